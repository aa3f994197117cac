//! Writes the integer program in CPLEX LP text format so an external MILP
//! solver can cross-check [`exact_solve`](super::exact_solve).
//!
//! ```text
//! min   Σ_{(u,a) dashed} x_u_a
//! s.t.  Σ_a f_u_a = t_u                 (R_user_<u>)
//!       Σ_u f_u_a <= c_a                (R_cap_<a>)
//!       f_u_a - t_u x_u_a <= 0          (R_act_<u>_<a>, dashed only)
//!       f integer >= 0, x binary
//! ```

use std::collections::HashSet;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::model::Instance;

const MAX_LINE: usize = 200;

/// LP-safe user labels. Characters outside `[A-Za-z0-9_.]` become `_`; if
/// that makes two ids collide every user is labelled by position instead.
pub fn lp_user_labels(inst: &Instance) -> Vec<String> {
    let labels: Vec<String> = inst
        .users()
        .iter()
        .map(|u| {
            u.id.chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
                .collect()
        })
        .collect();
    let distinct: HashSet<&String> = labels.iter().collect();
    if distinct.len() == labels.len() && labels.iter().all(|l| !l.is_empty()) {
        labels
    } else {
        (0..inst.num_users()).map(|i| format!("user{i}")).collect()
    }
}

/// The full model as LP text (LF line endings).
pub fn milp_text(inst: &Instance) -> String {
    let labels = lp_user_labels(inst);
    let n = inst.num_apps();
    let f = |u: usize, a: usize| format!("f_{}_{}", labels[u], a);
    let x = |u: usize, a: usize| format!("x_{}_{}", labels[u], a);

    let mut out = String::new();
    let _ = writeln!(
        out,
        "\\ minimum edge activation flow: {} users, {} apps, {} dashed edges",
        inst.num_users(),
        n,
        inst.num_dashed_edges()
    );
    out.push_str("Minimize\n");
    let objective: Vec<String> = inst.dashed_edges().map(|(u, a)| x(u, a)).collect();
    if objective.is_empty() {
        // A zero objective still needs a variable to be syntactically valid.
        let first = if inst.num_users() > 0 { f(0, 0) } else { String::new() };
        let _ = writeln!(out, " obj: 0 {first}");
    } else {
        push_expr(&mut out, " obj:", &objective, "");
    }

    out.push_str("Subject To\n");
    for (u, user) in inst.users().iter().enumerate() {
        let terms: Vec<String> = (0..n).map(|a| f(u, a)).collect();
        push_expr(&mut out, &format!(" R_user_{}:", labels[u]), &terms, &format!(" = {}", user.demand));
    }
    for (a, &c) in inst.capacities().iter().enumerate() {
        let terms: Vec<String> = (0..inst.num_users()).map(|u| f(u, a)).collect();
        if terms.is_empty() {
            continue;
        }
        push_expr(&mut out, &format!(" R_cap_{a}:"), &terms, &format!(" <= {c}"));
    }
    for (u, a) in inst.dashed_edges() {
        let _ = writeln!(
            out,
            " R_act_{}_{}: {} - {} {} <= 0",
            labels[u],
            a,
            f(u, a),
            inst.user(u).demand,
            x(u, a)
        );
    }

    out.push_str("Bounds\n");
    for (u, user) in inst.users().iter().enumerate() {
        for a in 0..n {
            let _ = writeln!(out, " 0 <= {} <= {}", f(u, a), user.demand);
        }
    }
    out.push_str("Generals\n");
    let generals: Vec<String> = (0..inst.num_users()).flat_map(|u| (0..n).map(move |a| (u, a))).map(|(u, a)| f(u, a)).collect();
    push_list(&mut out, &generals);
    out.push_str("Binaries\n");
    push_list(&mut out, &objective);
    out.push_str("End\n");
    out
}

pub fn export_milp(inst: &Instance, path: impl AsRef<Path>) -> io::Result<()> {
    std::fs::write(path, milp_text(inst))
}

/// `head t1 + t2 + ... tail`, wrapped before `MAX_LINE` columns.
fn push_expr(out: &mut String, head: &str, terms: &[String], tail: &str) {
    let mut line = String::from(head);
    for (i, t) in terms.iter().enumerate() {
        let piece = if i == 0 { format!(" {t}") } else { format!(" + {t}") };
        if line.len() + piece.len() > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line = String::from(" ");
        }
        line.push_str(&piece);
    }
    line.push_str(tail);
    out.push_str(&line);
    out.push('\n');
}

fn push_list(out: &mut String, names: &[String]) {
    let mut line = String::new();
    for name in names {
        if !line.is_empty() && line.len() + name.len() + 1 > MAX_LINE {
            out.push_str(&line);
            out.push('\n');
            line.clear();
        }
        line.push(' ');
        line.push_str(name);
    }
    if !line.is_empty() {
        out.push_str(&line);
        out.push('\n');
    }
}
