//! Holds the `acceptance` test target only. Run it with
//! `cargo test -p ticksim-validation --test acceptance`.
