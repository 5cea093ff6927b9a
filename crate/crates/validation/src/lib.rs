//! Holds the `acceptance` integration test; run it with
//! `cargo test -p seminorm-lab-validation --test acceptance -- --nocapture`.
