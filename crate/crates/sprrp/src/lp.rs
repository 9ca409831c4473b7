//! CPLEX-style LP file writer.

use std::fmt::Write;

use sprrp_core::mip::{MipModel, Term, VarKind};
use thiserror::Error;

/// Longest name and line accepted by common LP readers.
pub const MAX_NAME: usize = 255;
const MAX_LINE: usize = 255;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LpError {
    #[error("invalid LP name {0:?}")]
    InvalidName(String),
}

fn check_name(name: &str) -> Result<(), LpError> {
    let ok = !name.is_empty()
        && name.len() <= MAX_NAME
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(LpError::InvalidName(name.to_string()))
    }
}

/// Appends `head` followed by `pieces`, wrapping before any piece that would
/// push the line past the length limit.
fn wrapped(out: &mut String, head: String, pieces: impl IntoIterator<Item = String>) {
    let mut line = head;
    for p in pieces {
        if line.len() + p.len() > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line = String::from("   ");
        }
        line.push_str(&p);
    }
    out.push_str(&line);
    out.push('\n');
}

fn term_pieces<'a>(m: &'a MipModel, terms: &'a [Term]) -> impl Iterator<Item = String> + 'a {
    terms.iter().enumerate().map(move |(i, &(c, v))| {
        let name = &m.variables[v].name;
        let sign = if c < 0.0 { "-" } else if i == 0 { "" } else { "+" };
        let mag = c.abs();
        let lead = if i == 0 { "" } else { " " };
        let sep = if sign.is_empty() { "" } else { " " };
        if mag == 1.0 {
            format!("{lead}{sign}{sep}{name}")
        } else {
            format!("{lead}{sign}{sep}{mag} {name}")
        }
    })
}

/// Renders `m` as an LP file. Sections appear in the order Maximize,
/// Subject To, Bounds, Binaries, End; Bounds and Binaries are omitted when
/// empty.
pub fn write_lp(m: &MipModel) -> Result<String, LpError> {
    for v in &m.variables {
        check_name(&v.name)?;
    }
    for c in &m.constraints {
        check_name(&c.name)?;
    }
    let mut out = String::new();
    out.push_str("Maximize\n");
    if m.objective.is_empty() {
        out.push_str(" obj:\n");
    } else {
        wrapped(&mut out, String::from(" obj: "), term_pieces(m, &m.objective));
    }
    out.push_str("Subject To\n");
    for c in &m.constraints {
        let tail = std::iter::once(format!(" {} {}", c.relation.symbol(), c.rhs));
        let head = format!(" {}: ", c.name);
        if c.terms.is_empty() {
            wrapped(&mut out, head, std::iter::once(String::from("0")).chain(tail));
        } else {
            wrapped(&mut out, head, term_pieces(m, &c.terms).chain(tail));
        }
    }
    let bounds: Vec<String> = m
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Continuous)
        .map(|v| {
            if v.lower == v.upper {
                format!(" {} = {}", v.name, v.lower)
            } else {
                format!(" {} <= {} <= {}", v.lower, v.name, v.upper)
            }
        })
        .collect();
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        for b in bounds {
            let _ = writeln!(out, "{b}");
        }
    }
    let binaries: Vec<&str> =
        m.variables.iter().filter(|v| v.kind == VarKind::Binary).map(|v| v.name.as_str()).collect();
    if !binaries.is_empty() {
        out.push_str("Binaries\n");
        for b in binaries {
            let _ = writeln!(out, " {b}");
        }
    }
    out.push_str("End\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sprrp_core::mip::Relation;

    #[test]
    fn empty_model() {
        let text = write_lp(&MipModel::default()).unwrap();
        assert_eq!(text, "Maximize\n obj:\nSubject To\nEnd\n");
    }

    #[test]
    fn one_binary_one_constraint() {
        let mut m = MipModel::default();
        let x = m.add_var("x".into(), VarKind::Binary, 0.0, 1.0);
        m.objective.push((2.0, x));
        m.add_constraint("c1".into(), vec![(1.0, x)], Relation::Le, 1.0);
        let text = write_lp(&m).unwrap();
        assert_eq!(text, "Maximize\n obj: 2 x\nSubject To\n c1: x <= 1\nBinaries\n x\nEnd\n");
        assert_eq!(text.lines().count(), 7);
    }

    #[test]
    fn signs_bounds_and_fixed_values() {
        let mut m = MipModel::default();
        let a = m.add_var("a".into(), VarKind::Continuous, 0.0, 2.5);
        let b = m.add_var("b".into(), VarKind::Continuous, 3.0, 3.0);
        m.add_constraint("r".into(), vec![(-1.0, a), (0.5, b), (-4.0, a)], Relation::Ge, -2.0);
        let text = write_lp(&m).unwrap();
        assert!(text.contains(" r: - a + 0.5 b - 4 a >= -2\n"), "{text}");
        assert!(text.contains("Bounds\n 0 <= a <= 2.5\n b = 3\n"));
        assert!(!text.contains("Binaries"));
    }

    #[test]
    fn rejects_bad_names() {
        for bad in ["1x", "a-b", "", &"x".repeat(256)] {
            let mut m = MipModel::default();
            m.add_var(bad.to_string(), VarKind::Binary, 0.0, 1.0);
            assert_eq!(write_lp(&m), Err(LpError::InvalidName(bad.to_string())));
        }
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = MipModel::default();
        let vars: Vec<usize> =
            (0..100).map(|i| m.add_var(format!("variable_{i}"), VarKind::Binary, 0.0, 1.0)).collect();
        m.add_constraint("big".into(), vars.iter().map(|&v| (1.0, v)).collect(), Relation::Le, 1.0);
        let text = write_lp(&m).unwrap();
        assert!(text.lines().all(|l| l.len() <= MAX_LINE));
        assert!(text.lines().filter(|l| l.starts_with("   ")).count() > 1);
    }
}
