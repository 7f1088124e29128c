//! CPLEX-style LP text export.
//!
//! Rows are named `<tag>_<index>` where `index` is the constraint's
//! position in the model; ranged rows are split into `_lo` and `_hi`
//! halves. Long expressions wrap at [`LINE_WIDTH`] columns with
//! continuation lines indented by three spaces. Output depends only on
//! the model, so equal models give byte-identical documents.

use std::fmt::Write as _;

use super::model::{LinearConstraint, Model, VarId};

const LINE_WIDTH: usize = 78;

fn sanitize(tag: &str) -> String {
    let mut s: String = tag.chars().map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' }).collect();
    if s.is_empty() || s.starts_with(|c: char| c.is_ascii_digit()) {
        s.insert(0, 'r');
    }
    s
}

/// Writes `head` followed by the expression and `tail`, wrapping long lines.
fn write_row(out: &mut String, head: &str, terms: &[(i64, VarId)], model: &Model, tail: &str) {
    let mut pieces: Vec<String> = Vec::with_capacity(terms.len() + 1);
    for (i, &(c, v)) in terms.iter().enumerate() {
        let name = model.var_name(v);
        let sign = if c < 0 { "-" } else if i == 0 { "" } else { "+" };
        let mag = c.unsigned_abs();
        let coef = if mag == 1 { String::new() } else { format!("{mag} ") };
        let sep = if sign.is_empty() { "" } else { " " };
        pieces.push(format!("{sign}{sep}{coef}{name}"));
    }
    if pieces.is_empty() {
        // LP rows need at least one variable.
        match model.var_names().first() {
            Some(first) => pieces.push(format!("0 {first}")),
            None => pieces.push("0".to_string()),
        }
    }
    if !tail.is_empty() {
        pieces.push(tail.to_string());
    }
    let mut line = String::from(head);
    for piece in pieces {
        if line.len() + 1 + piece.len() > LINE_WIDTH && line.trim().len() > head.trim().len() {
            let _ = writeln!(out, "{line}");
            line = String::from("  ");
        }
        line.push(' ');
        line.push_str(&piece);
    }
    let _ = writeln!(out, "{line}");
}

fn write_constraint(out: &mut String, idx: usize, c: &LinearConstraint, model: &Model) {
    let base = format!("{}_{idx}", sanitize(&c.tag));
    match (c.lower, c.upper) {
        (Some(l), Some(u)) if l == u => write_row(out, &format!(" {base}:"), &c.terms, model, &format!("= {l}")),
        (Some(l), Some(u)) => {
            write_row(out, &format!(" {base}_lo:"), &c.terms, model, &format!(">= {l}"));
            write_row(out, &format!(" {base}_hi:"), &c.terms, model, &format!("<= {u}"));
        }
        (Some(l), None) => write_row(out, &format!(" {base}:"), &c.terms, model, &format!(">= {l}")),
        (None, Some(u)) => write_row(out, &format!(" {base}:"), &c.terms, model, &format!("<= {u}")),
        // Free rows carry no information for the solver.
        (None, None) => {}
    }
}

pub fn export_lp(model: &Model) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "\\ {} variables, {} constraints", model.num_vars(), model.num_constraints());
    let _ = writeln!(out, "Minimize");
    let terms = model.objective().map(|o| o.terms.as_slice()).unwrap_or(&[]);
    write_row(&mut out, " obj:", terms, model, "");
    let _ = writeln!(out, "Subject To");
    for (idx, c) in model.constraints().iter().enumerate() {
        write_constraint(&mut out, idx, c, model);
    }
    let _ = writeln!(out, "Binary");
    for name in model.var_names() {
        let _ = writeln!(out, " {name}");
    }
    let _ = writeln!(out, "End");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_model() {
        let doc = export_lp(&Model::new());
        assert_eq!(doc, "\\ 0 variables, 0 constraints\nMinimize\n obj: 0\nSubject To\nBinary\nEnd\n");
    }

    #[test]
    fn single_var_skeleton() {
        let mut m = Model::new();
        let x0 = m.add_var("x0").unwrap();
        m.set_objective(vec![(1, x0)]).unwrap();
        m.add_constraint(LinearConstraint::at_least(vec![(1, x0)], 1, "lb")).unwrap();
        let doc = export_lp(&m);
        let lines: Vec<&str> = doc.lines().collect();
        assert!(lines.contains(&"Minimize"));
        assert!(lines.contains(&" obj: x0"));
        assert!(lines.contains(&" lb_0: x0 >= 1"));
        assert!(lines.contains(&"Binary"));
        assert!(lines.contains(&" x0"));
        assert_eq!(lines.last(), Some(&"End"));
    }

    #[test]
    fn signs_ranges_and_equalities() {
        let mut m = Model::new();
        let a = m.add_var("a").unwrap();
        let b = m.add_var("b").unwrap();
        m.add_constraint(LinearConstraint::new(vec![(-2, a), (3, b)], Some(-1), Some(2), "eq 4")).unwrap();
        m.add_constraint(LinearConstraint::equal(vec![(1, a), (-1, b)], 0, "link")).unwrap();
        let doc = export_lp(&m);
        assert!(doc.contains(" eq_4_0_lo: - 2 a + 3 b >= -1\n"));
        assert!(doc.contains(" eq_4_0_hi: - 2 a + 3 b <= 2\n"));
        assert!(doc.contains(" link_1: a - b = 0\n"));
        assert!(doc.contains(" obj: 0 a\n"));
    }

    #[test]
    fn long_rows_wrap() {
        let mut m = Model::new();
        let vars: Vec<_> = (0..60).map(|i| m.add_var(format!("alpha_{i}")).unwrap()).collect();
        m.add_constraint(LinearConstraint::at_most(vars.iter().map(|&v| (1, v)).collect(), 5, "sum")).unwrap();
        let doc = export_lp(&m);
        assert!(doc.lines().all(|l| l.len() <= LINE_WIDTH + 12));
        let joined: String = doc.split("Subject To\n").nth(1).unwrap().split("Binary").next().unwrap().into();
        assert_eq!(joined.matches("alpha_").count(), 60);
        assert!(joined.trim_end().ends_with("<= 5"));
    }

    #[test]
    fn deterministic() {
        let build = || {
            let mut m = Model::new();
            let a = m.add_var("a").unwrap();
            let b = m.add_var("b").unwrap();
            m.add_constraint(LinearConstraint::at_most(vec![(1, b), (1, a)], 1, "x")).unwrap();
            m
        };
        assert_eq!(export_lp(&build()), export_lp(&build()));
    }
}
