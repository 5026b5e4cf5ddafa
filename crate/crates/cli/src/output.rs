use std::io::Write;

use serde::Serialize;

use crate::config::{Config, Format, BEGIN_MARKER, END_MARKER};
use crate::error::CliError;

/// Fixed column order of every results table.
pub const COLUMNS: [&str; 15] = [
    "experiment",
    "protocol",
    "d",
    "eta",
    "eps",
    "eps0",
    "eps_ec",
    "trials",
    "j",
    "sigma_out",
    "mu_out",
    "Sigma_out",
    "bound",
    "truncated_trials",
    "seed",
];

/// One results row. Columns that do not apply stay empty (`null` in JSON).
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Row {
    pub experiment: String,
    pub protocol: String,
    pub d: Option<u32>,
    pub eta: Option<f64>,
    pub eps: Option<f64>,
    pub eps0: Option<f64>,
    pub eps_ec: Option<f64>,
    pub trials: Option<usize>,
    pub j: Option<u32>,
    /// Width of the output confidence interval.
    pub sigma_out: Option<f64>,
    /// Centre of the output confidence interval.
    pub mu_out: Option<f64>,
    #[serde(rename = "Sigma_out")]
    pub big_sigma_out: Option<f64>,
    pub bound: Option<f64>,
    pub truncated_trials: Option<usize>,
    pub seed: Option<u64>,
}

impl Row {
    pub fn new(experiment: &str, protocol: impl Into<String>) -> Self {
        Self {
            experiment: experiment.into(),
            protocol: protocol.into(),
            ..Self::default()
        }
    }

    fn fields(&self) -> [String; 15] {
        fn opt<T: std::fmt::Display>(x: &Option<T>) -> String {
            x.as_ref().map(|v| v.to_string()).unwrap_or_default()
        }
        [
            self.experiment.clone(),
            self.protocol.clone(),
            opt(&self.d),
            opt(&self.eta),
            opt(&self.eps),
            opt(&self.eps0),
            opt(&self.eps_ec),
            opt(&self.trials),
            opt(&self.j),
            opt(&self.sigma_out),
            opt(&self.mu_out),
            opt(&self.big_sigma_out),
            opt(&self.bound),
            opt(&self.truncated_trials),
            opt(&self.seed),
        ]
    }
}

/// Opens the destination on first use.
pub type Opener = Box<dyn FnOnce() -> std::io::Result<Box<dyn Write>>>;

/// Serialises rows to CSV as they arrive, or collects them into one JSON
/// document written by [`ResultWriter::finish`]. Nothing is opened or
/// written before the first row or the call to `finish`, so a run rejected
/// during validation leaves no output behind.
pub struct ResultWriter {
    pending: Option<Pending>,
    inner: Option<Inner>,
}

struct Pending {
    open: Opener,
    command: String,
    config: Config,
    generated: u64,
}

enum Inner {
    Csv(csv::Writer<Box<dyn Write>>),
    Json {
        out: Box<dyn Write>,
        head: JsonHead,
        rows: Vec<Row>,
    },
}

#[derive(Serialize)]
struct JsonHead {
    generated: u64,
    command: String,
    config: String,
}

#[derive(Serialize)]
struct JsonDoc<'a> {
    #[serde(flatten)]
    head: &'a JsonHead,
    rows: &'a [Row],
}

impl ResultWriter {
    /// `generated` is the only value that may differ between two runs of
    /// the same config.
    pub fn new(open: Opener, command: &str, config: &Config, generated: u64) -> Self {
        Self {
            pending: Some(Pending {
                open,
                command: command.into(),
                config: config.clone(),
                generated,
            }),
            inner: None,
        }
    }

    /// Writes the comment header (CSV) and column names.
    fn inner(&mut self) -> Result<&mut Inner, CliError> {
        if let Some(p) = self.pending.take() {
            let mut out = (p.open)()?;
            let toml = p.config.to_toml();
            let inner = match p.config.format {
                Format::Csv => {
                    writeln!(out, "# ticksim results")?;
                    writeln!(out, "# generated: {}", p.generated)?;
                    writeln!(out, "# command: {}", p.command)?;
                    writeln!(out, "{BEGIN_MARKER}")?;
                    for line in toml.lines() {
                        if line.is_empty() {
                            writeln!(out, "#")?;
                        } else {
                            writeln!(out, "# {line}")?;
                        }
                    }
                    writeln!(out, "{END_MARKER}")?;
                    let mut w = csv::WriterBuilder::new()
                        .terminator(csv::Terminator::Any(b'\n'))
                        .from_writer(out);
                    w.write_record(COLUMNS).map_err(csv_err)?;
                    w.flush()?;
                    Inner::Csv(w)
                }
                Format::Json => Inner::Json {
                    out,
                    head: JsonHead {
                        generated: p.generated,
                        command: p.command,
                        config: toml,
                    },
                    rows: Vec::new(),
                },
            };
            self.inner = Some(inner);
        }
        Ok(self.inner.as_mut().expect("writer opened"))
    }

    pub fn row(&mut self, row: Row) -> Result<(), CliError> {
        match self.inner()? {
            Inner::Csv(w) => {
                w.write_record(row.fields()).map_err(csv_err)?;
                // flushed per row so partial results survive an interrupt
                w.flush()?;
            }
            Inner::Json { rows, .. } => rows.push(row),
        }
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.inner()?;
        match self.inner.take().expect("writer opened") {
            Inner::Csv(mut w) => w.flush()?,
            Inner::Json {
                mut out,
                head,
                rows,
            } => {
                let doc = JsonDoc {
                    head: &head,
                    rows: &rows,
                };
                serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Io(e.into()))?;
                writeln!(out)?;
                out.flush()?;
            }
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => CliError::Io(e),
        other => CliError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}
