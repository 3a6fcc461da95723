//! Holds the `acceptance` integration test target. The package sorts after
//! the library crates, so a failing criterion does not stop their tests.
