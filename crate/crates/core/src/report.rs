//! The end-to-end replication run on `Y` and its serialized transcript.
//!
//! Stages run in order and the first failing stage halts the run with its name and residual:
//! `build-y`, `pd-consistency`, `torus-product`, then per convention `vanishing`, `main-term`,
//! `coset`. Serialization goes through `serde_json::Value`, whose maps are sorted, so reports are
//! byte-stable; rationals appear only inside rendered strings as reduced `p/q`.

use serde::Serialize;

use crate::data;
use crate::error::Result;
use crate::gw::{GwTable, PdConvention};
use crate::massey::{main_display_x3, main_inputs, run_system, y_setting, Certificate, VanishingEntry};
use crate::y::{build_y_from, parse_star_table, reproduce_tables, verify_extension, y_class, Convention, TableMismatch, YModel};

/// Inputs of a run. `None` texts are read from the dataset directory (see [`data::load`]).
#[derive(Clone, Debug, Default)]
pub struct RunConfig {
    pub algebra: Option<String>,
    pub gw: Option<String>,
    pub tables: Option<String>,
    /// Conventions to run; empty means both.
    pub conventions: Vec<Convention>,
}

impl RunConfig {
    fn text(given: &Option<String>, name: &str) -> Result<String> {
        match given {
            Some(t) => Ok(t.clone()),
            None => data::load(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: String,
    pub ok: bool,
    pub detail: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Halt {
    pub stage: String,
    pub residual: String,
}

/// One displayed cancellation: `X3 *_B X2` at entry `(row, col)` with its terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Display {
    pub class: String,
    pub entry: String,
    pub terms: Vec<String>,
    pub sum: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionRun {
    pub convention: String,
    pub inputs: Vec<String>,
    pub vanishing: Vec<VanishingEntry>,
    pub displays: Vec<Display>,
    pub main_term: String,
    pub theta: Vec<Vec<String>>,
    pub ambiguity_rank: usize,
    pub certificate: Option<Certificate>,
    pub nontrivial: bool,
    /// The same computation with the first input as displayed next to the main-term evaluation.
    pub display_input: String,
    pub display_main_term: String,
    pub display_error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Transcript {
    pub stages: Vec<Stage>,
    pub table_notes: Vec<TableMismatch>,
    pub runs: Vec<ConventionRun>,
    pub halted: Option<Halt>,
    /// True iff the run completed and every convention produced a nontrivial coset.
    pub verdict: bool,
}

impl Transcript {
    fn halt(mut self, stage: &str, residual: String) -> Transcript {
        self.stages.push(Stage { name: stage.into(), ok: false, detail: vec![residual.clone()] });
        self.halted = Some(Halt { stage: stage.into(), residual });
        self.verdict = false;
        self
    }

    /// Sorted-key JSON.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("transcript serializes");
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in &self.stages {
            out.push_str(&format!("[{}] {}\n", if s.ok { "ok" } else { "FAIL" }, s.name));
            for d in &s.detail {
                out.push_str(&format!("    {d}\n"));
            }
        }
        if !self.table_notes.is_empty() {
            out.push_str(&format!("table notes: {} literal entries differ from the rebuilt products\n", self.table_notes.len()));
            for m in self.table_notes.iter().take(8) {
                out.push_str(&format!("    {}: {} * {} table {} computed {}\n", m.class, m.x, m.z, m.table, m.computed));
            }
        }
        for r in &self.runs {
            out.push_str(&format!("\n== convention {}\n", r.convention));
            out.push_str(&format!("X3 = {}\nX2 = {}\nX1 = {}\n", r.inputs[0], r.inputs[1], r.inputs[2]));
            for d in &r.displays {
                out.push_str(&format!("X3 *_{} X2 at {} = {}\n", d.class, d.entry, d.sum));
            }
            let zero = r.vanishing.iter().filter(|e| e.zero).count();
            out.push_str(&format!("vanishing: {zero}/{} products zero\n", r.vanishing.len()));
            out.push_str(&format!("mu3_2F(X3, X2, X1) = {}\n", r.main_term));
            out.push_str(&format!("ambiguity rank {}, nontrivial = {}\n", r.ambiguity_rank, r.nontrivial));
            out.push_str(&format!("display input X3 = {}: main term {}", r.display_input, r.display_main_term));
            match &r.display_error {
                Some(e) => out.push_str(&format!(", {e}\n")),
                None => out.push('\n'),
            }
        }
        if let Some(h) = &self.halted {
            out.push_str(&format!("\nhalted at {}: {}\n", h.stage, h.residual));
        }
        out.push_str(&format!("\nverdict: {}\n", if self.verdict { "nontrivial" } else { "not established" }));
        out
    }
}

fn convention_run(model: &YModel, conv: Convention) -> Result<ConventionRun> {
    let s = y_setting(model, conv)?;
    let [x3, x2, x1] = main_inputs(&s.basis)?;
    let run = run_system(&s, &x3, &x2, &x1)?;
    let mut displays = Vec::new();
    for e in run.vanishing.entries.iter().filter(|e| e.pair == "X3*X2") {
        for (i, j, terms, sum) in &e.terms {
            displays.push(Display { class: e.class.clone(), entry: format!("({i},{j})"), terms: terms.clone(), sum: sum.clone() });
        }
    }
    let (theta, rank) = match &run.coset {
        Some(c) => {
            let m = c.representative_matrix();
            let rows = (0..m.n).map(|i| (0..m.n).map(|j| s.basis.render_element(m.get(i, j))).collect()).collect();
            (rows, c.ambiguity.rank())
        }
        None => (Vec::new(), 0),
    };
    let d3 = main_display_x3(&s.basis)?;
    let display = run_system(&s, &d3, &x2, &x1)?;
    Ok(ConventionRun {
        convention: conv.name().into(),
        inputs: [&x3, &x2, &x1].iter().map(|x| x.render(&s.basis)).collect(),
        vanishing: run.vanishing.entries.clone(),
        displays,
        main_term: run.main_term.render(&s.basis),
        theta,
        ambiguity_rank: rank,
        nontrivial: run.certificate.as_ref().is_some_and(|c| c.nontrivial),
        certificate: run.certificate,
        display_input: d3.render(&s.basis),
        display_main_term: display.main_term.render(&s.basis),
        display_error: display.error,
    })
}

/// Runs the full pipeline; stage failures are reported in the transcript, not as errors.
pub fn replicate(cfg: &RunConfig) -> Transcript {
    let mut t = Transcript { stages: Vec::new(), table_notes: Vec::new(), runs: Vec::new(), halted: None, verdict: false };
    let table: GwTable = match RunConfig::text(&cfg.algebra, "y_algebra.txt")
        .and_then(|a| RunConfig::text(&cfg.gw, "y_gw.txt").and_then(|g| build_y_from(&a, &g)))
    {
        Ok(x) => x,
        Err(e) => return t.halt("build-y", e.to_string()),
    };
    let bad = table.target.verify();
    let bad: Vec<_> = bad.iter().filter(|v| !v.axiom.starts_with("pairing")).collect();
    if let Some(v) = bad.first() {
        return t.halt("build-y", format!("{} fails on ({}): {}", v.axiom, v.labels.join(","), v.detail));
    }
    t.stages.push(Stage { name: "build-y".into(), ok: true, detail: vec![format!("{} stored invariants", table.entries.len())] });

    // The class-F table is what the vanishing displays consume; it must agree with the invariants exactly.
    let stars = match RunConfig::text(&cfg.tables, "y_tables.txt").and_then(|x| parse_star_table(&table.target.basis, &x)) {
        Ok(s) => s,
        Err(e) => return t.halt("pd-consistency", e.to_string()),
    };
    let (f, tc, rc) = match (y_class("F"), y_class("T"), y_class("R")) {
        (Ok(f), Ok(tc), Ok(rc)) => (f, tc, rc),
        _ => return t.halt("pd-consistency", "class names".into()),
    };
    match reproduce_tables(&table, &stars, &[f], PdConvention::ProductLast) {
        Ok(m) if m.is_empty() => {
            t.stages.push(Stage { name: "pd-consistency".into(), ok: true, detail: vec!["class F table reproduced entrywise".into()] })
        }
        Ok(m) => {
            let x = &m[0];
            return t.halt(
                "pd-consistency",
                format!("{} of {} entries differ; first {} *_F {}: table {}, invariants give {}", m.len(), 14 * 14, x.x, x.z, x.table, x.computed),
            );
        }
        Err(e) => return t.halt("pd-consistency", e.to_string()),
    }
    match reproduce_tables(&table, &stars, &[tc, rc], PdConvention::ProductLast) {
        Ok(m) => t.table_notes = m,
        Err(e) => return t.halt("pd-consistency", e.to_string()),
    }

    let model = match YModel::from_table(table) {
        Ok(m) => m,
        Err(e) => return t.halt("torus-product", e.to_string()),
    };
    let ext = verify_extension(
        &model.torus.base,
        &model.torus.algebra,
        &model.torus.t,
        &model.torus.j,
        &model.products,
        &model.torus_products,
        &model.ring.truncation,
    );
    match ext {
        Ok(r) if r.malformed.is_empty() => {
            let mut detail = vec![format!("{} extension violations", r.violations.len())];
            detail.extend(r.violations.iter().take(4).map(|v| format!("{} ({}): {}", v.axiom, v.labels.join(","), v.detail)));
            t.stages.push(Stage { name: "torus-product".into(), ok: true, detail });
        }
        Ok(r) => return t.halt("torus-product", r.malformed.join("; ")),
        Err(e) => return t.halt("torus-product", e.to_string()),
    }

    let convs = if cfg.conventions.is_empty() { Convention::ALL.to_vec() } else { cfg.conventions.clone() };
    for conv in convs {
        let run = match convention_run(&model, conv) {
            Ok(r) => r,
            Err(e) => return t.halt(&format!("coset ({})", conv.name()), e.to_string()),
        };
        let vanish_ok = run.vanishing.iter().all(|e| e.zero);
        t.stages.push(Stage {
            name: format!("vanishing ({})", conv.name()),
            ok: vanish_ok,
            detail: run.vanishing.iter().filter(|e| !e.zero).map(|e| format!("{} at {} = {}", e.pair, e.class, e.product)).collect(),
        });
        t.stages.push(Stage { name: format!("main-term ({})", conv.name()), ok: true, detail: vec![run.main_term.clone()] });
        t.stages.push(Stage {
            name: format!("coset ({})", conv.name()),
            ok: run.nontrivial,
            detail: vec![format!("representative {:?}, ambiguity rank {}", run.theta, run.ambiguity_rank)],
        });
        t.runs.push(run);
    }
    t.verdict = t.halted.is_none() && !t.runs.is_empty() && t.runs.iter().all(|r| r.nontrivial);
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reports_are_byte_stable() {
        let a = replicate(&RunConfig::default()).to_json();
        let b = replicate(&RunConfig::default()).to_json();
        assert_eq!(a, b);
        let v: serde_json::Value = serde_json::from_str(&a).unwrap();
        assert!(v["verdict"].is_boolean());
    }

    #[test]
    fn displays_follow_class_order() {
        let t = replicate(&RunConfig::default());
        assert!(t.halted.is_none());
        for r in &t.runs {
            let classes: Vec<&str> = r.displays.iter().map(|d| d.class.as_str()).collect();
            assert_eq!(classes, vec!["0", "F", "R"]);
            assert_eq!(r.displays[0].sum, "-pt + pt");
            assert_eq!(r.displays[2].sum, "(l + 3*f) - (l + 3*f)");
        }
    }

    #[test]
    fn corrupted_table_two_halts() {
        let text = data::load("y_tables.txt").unwrap().replace("star 0,1 ua1 ub1 = f", "star 0,1 ua1 ub1 = 2*f");
        let t = replicate(&RunConfig { tables: Some(text), ..Default::default() });
        let h = t.halted.unwrap();
        assert_eq!(h.stage, "pd-consistency");
        assert!(h.residual.contains("ua1 *_F ub1"), "{}", h.residual);
        assert!(!t.verdict);
    }
}
