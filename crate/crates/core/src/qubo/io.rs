//! Text formats for models and sample sets.
//!
//! ```text
//! qubo n=3
//! 0 0 -1.0000000000000000e0
//! 0 1 2.0000000000000000e0
//! ```
//!
//! ```text
//! samples n=2 reads=10
//! -1.0000000000000000e0 6 10
//! 0.0000000000000000e0 4 11
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Reals are written
//! with 17 significant digits and read back bit-identically.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{Qubo, Sample, SampleSet, State};
use crate::error::{Error, Result};
use crate::text::{content_lines, field, fmt_real, header, number, real};

impl Qubo {
    pub fn to_text(&self) -> String {
        let mut out = format!("qubo n={}\n", self.n());
        for (i, j, v) in self.terms() {
            writeln!(out, "{i} {j} {}", fmt_real(v)).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Qubo> {
        let mut lines = content_lines(text);
        let (line_no, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty qubo file"))?;
        let n: usize = field(&header(line_no, first, "qubo")?, "n", line_no)?;
        let mut q = Qubo::new(n);
        let mut seen = HashSet::new();
        for (line_no, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(Error::parse(
                    line_no,
                    format!("expected `i j value`, found {line:?}"),
                ));
            }
            let i: usize = number(tokens[0], line_no, "index")?;
            let j: usize = number(tokens[1], line_no, "index")?;
            let v = real(tokens[2], line_no)?;
            if i > j {
                return Err(Error::parse(
                    line_no,
                    format!("term ({i}, {j}) is below the diagonal"),
                ));
            }
            if j >= n {
                return Err(Error::parse(
                    line_no,
                    format!("index {j} out of range for n={n}"),
                ));
            }
            if !seen.insert((i, j)) {
                return Err(Error::parse(line_no, format!("duplicate term ({i}, {j})")));
            }
            q.set(i, j, v)
                .map_err(|e| Error::parse(line_no, e.to_string()))?;
        }
        Ok(q)
    }
}

impl SampleSet {
    pub fn to_text(&self) -> String {
        let mut out = format!("samples n={} reads={}\n", self.n(), self.reads());
        for s in self.samples() {
            writeln!(out, "{} {} {}", fmt_real(s.energy), s.occurrences, s.state).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<SampleSet> {
        let mut lines = content_lines(text);
        let (line_no, first) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "empty sampleset file"))?;
        let fields = header(line_no, first, "samples")?;
        let n: usize = field(&fields, "n", line_no)?;
        let reads: usize = field(&fields, "reads", line_no)?;
        let mut samples = Vec::new();
        let mut last = f64::NEG_INFINITY;
        for (line_no, line) in lines {
            let tokens: Vec<&str> = line.split_whitespace().collect();
            let bits = match (tokens.len(), n) {
                (3, _) => tokens[2],
                (2, 0) => "",
                _ => {
                    return Err(Error::parse(
                        line_no,
                        format!("expected `energy occurrences bits`, found {line:?}"),
                    ))
                }
            };
            let energy = real(tokens[0], line_no)?;
            let occurrences: usize = number(tokens[1], line_no, "occurrence count")?;
            if occurrences == 0 {
                return Err(Error::parse(line_no, "occurrence count must be positive"));
            }
            let state: State = bits
                .parse()
                .map_err(|e: Error| Error::parse(line_no, e.to_string()))?;
            if state.len() != n {
                return Err(Error::parse(
                    line_no,
                    format!("state has {} bits, header says n={n}", state.len()),
                ));
            }
            if energy < last {
                return Err(Error::parse(line_no, "energies are not in ascending order"));
            }
            last = energy;
            samples.push(Sample {
                state,
                energy,
                occurrences,
            });
        }
        let set =
            SampleSet::from_sorted(n, samples).map_err(|e| Error::parse(line_no, e.to_string()))?;
        if set.reads() != reads {
            return Err(Error::parse(
                line_no,
                format!(
                    "occurrences sum to {}, header says reads={reads}",
                    set.reads()
                ),
            ));
        }
        Ok(set)
    }
}

pub fn write_qubo(path: impl AsRef<Path>, q: &Qubo) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, q.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_qubo(path: impl AsRef<Path>) -> Result<Qubo> {
    let path = path.as_ref();
    Qubo::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

pub fn write_sampleset(path: impl AsRef<Path>, set: &SampleSet) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, set.to_text()).map_err(|e| Error::io(path, e))
}

pub fn read_sampleset(path: impl AsRef<Path>) -> Result<SampleSet> {
    let path = path.as_ref();
    SampleSet::parse(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_model_round_trips() {
        let q = Qubo::new(0);
        assert_eq!(q.to_text(), "qubo n=0\n");
        assert_eq!(Qubo::parse(&q.to_text()).unwrap(), q);
    }

    #[test]
    fn duplicate_entry_names_its_line() {
        let text = "qubo n=3\n0 0 1.0\n2 2 1.0\n2 2 3.0\n";
        match Qubo::parse(text) {
            Err(Error::Parse { line, message }) => {
                assert_eq!(line, 4);
                assert!(message.contains("duplicate"));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_are_rejected() {
        for (text, line) in [
            ("qubo n=2\n0 1\n", 2),
            ("qubo n=2\n0 2 1.0\n", 2),
            ("qubo n=2\n1 0 1.0\n", 2),
            ("qubo n=2\n\n# note\n0 x 1.0\n", 4),
            ("qubo n=2\n0 1 inf\n", 2),
            ("qubit n=2\n", 1),
        ] {
            match Qubo::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn sampleset_round_trip_and_checks() {
        let q = Qubo::from_terms(2, [(0, 0, -1.0), (1, 1, -0.5), (0, 1, 2.0)]).unwrap();
        let states = ["10", "10", "01", "00", "11"].map(|s| s.parse::<State>().unwrap());
        let set = SampleSet::from_states(&q, states).unwrap();
        let text = set.to_text();
        assert!(text.starts_with("samples n=2 reads=5\n"));
        assert_eq!(SampleSet::parse(&text).unwrap(), set);

        let unsorted = "samples n=1 reads=2\n0.0 1 0\n-1.0 1 1\n";
        assert!(matches!(
            SampleSet::parse(unsorted),
            Err(Error::Parse { line: 3, .. })
        ));
        let miscounted = "samples n=1 reads=3\n-1.0 1 1\n0.0 1 0\n";
        assert!(SampleSet::parse(miscounted).is_err());
        let wide = "samples n=1 reads=1\n0.0 1 00\n";
        assert!(SampleSet::parse(wide).is_err());
    }

    #[test]
    fn file_helpers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.qubo");
        let q = Qubo::from_terms(3, [(0, 2, 0.1), (1, 1, -7.25)]).unwrap();
        write_qubo(&path, &q).unwrap();
        assert_eq!(read_qubo(&path).unwrap(), q);
        let missing = dir.path().join("missing.qubo");
        assert!(matches!(read_qubo(&missing), Err(Error::Io { .. })));
    }

    proptest! {
        #[test]
        fn text_round_trip_is_identity(
            n in 1usize..12,
            raw in proptest::collection::vec((0usize..12, 0usize..12, -1e6f64..1e6), 0..40),
        ) {
            let mut q = Qubo::new(n);
            for (i, j, v) in raw {
                q.set(i % n, j % n, v).unwrap();
            }
            let back = Qubo::parse(&q.to_text()).unwrap();
            let a: Vec<_> = q.terms().map(|(i, j, v)| (i, j, v.to_bits())).collect();
            let b: Vec<_> = back.terms().map(|(i, j, v)| (i, j, v.to_bits())).collect();
            prop_assert_eq!(a, b);
            prop_assert_eq!(back.n(), n);
        }
    }
}
