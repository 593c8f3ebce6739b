//! Command-line front end. Every subcommand prints a report and returns exit code 0 iff all the
//! checks it ran passed.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::ainf::{ainfty_check, formal_fixture, heisenberg, property_suite, small_algebras, AInfinityStructure};
use crate::algebra::GradedAlgebra;
use crate::data;
use crate::error::{Error, Result};
use crate::gw::PdConvention;
use crate::johnson::{self, SymplecticModule};
use crate::massey::{classical_massey, coset_nontrivial, surface_matrix_massey};
use crate::report::{replicate, RunConfig};
use crate::trees;
use crate::y::{self, Convention};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "qmassey", version, about = "Exact computations with quantum products, A-infinity structures and Massey products")]
pub struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Tabulated,
    Stated,
    Both,
}

impl ConventionArg {
    fn list(self) -> Vec<Convention> {
        match self {
            ConventionArg::Tabulated => vec![Convention::Tabulated],
            ConventionArg::Stated => vec![Convention::Stated],
            ConventionArg::Both => Convention::ALL.to_vec(),
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Quantum tables of the blowup Y.
    #[command(subcommand)]
    Y(YCmd),
    /// Gromov-Witten tables.
    #[command(subcommand)]
    Gw(GwCmd),
    /// A-infinity structures and Hochschild cohomology.
    #[command(subcommand)]
    Ainf(AinfCmd),
    /// Classical and quantum matrix Massey products.
    #[command(subcommand)]
    Massey(MasseyCmd),
    /// Free Lie algebras and Johnson values.
    #[command(subcommand)]
    Johnson(JohnsonCmd),
    /// Stable trees and the associahedron.
    #[command(subcommand)]
    Trees(TreesCmd),
    /// Full replication run with transcript.
    Replicate {
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum YCmd {
    /// Rebuild the F, T, R product tables and compare with the literal ones.
    Tables {
        #[arg(long, default_value = "product-last")]
        pd: String,
    },
    /// Recover every stored three-point invariant from the products.
    PdRoundtrip,
    /// Rederive invariants through WDVV and the blowup recursion.
    Derive,
    /// Betti numbers of the mapping torus of `phi` (identity by default).
    Cone {
        #[arg(long)]
        phi: Option<PathBuf>,
    },
    /// Check that the torus products extend the products of Y.
    Extension,
}

#[derive(Subcommand, Debug)]
pub enum GwCmd {
    /// Evaluate one invariant through the reduction axioms.
    Eval {
        #[arg(long)]
        class: String,
        /// Comma separated insertions.
        #[arg(long)]
        inputs: String,
    },
    /// Axiom checks on the stored table.
    Check,
}

#[derive(Subcommand, Debug)]
pub enum AinfCmd {
    /// Check the A-infinity equations of a structure file.
    Check {
        #[arg(long)]
        file: PathBuf,
    },
    /// Seeded property suite.
    Suite {
        #[arg(long, default_value_t = 200)]
        cochains: usize,
        #[arg(long, default_value_t = 100)]
        gauges: usize,
        #[arg(long, default_value_t = 20)]
        homotopies: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum MasseyCmd {
    /// Triple product on a fixture: `heisenberg` or `formal`.
    Classical {
        #[arg(long, default_value = "heisenberg")]
        fixture: String,
        /// Comma separated `a3,a2,a1`.
        #[arg(long, default_value = "x,x,y")]
        inputs: String,
    },
    /// The 2x2 product on the mapping torus of Y.
    Main {
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
    },
    /// The 2x2 product on the mapping torus of the genus 4 surface.
    Surface {
        #[arg(long, value_enum, default_value_t = ConventionArg::Both)]
        convention: ConventionArg,
    },
}

#[derive(Subcommand, Debug)]
pub enum JohnsonCmd {
    /// tau_1 of the genus-h bounding pair twist.
    Tau1 {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        h: usize,
    },
    /// tau_2 of the genus-h separating twist, compared with the image of -omega (x) omega.
    Tau2 {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        h: usize,
    },
    /// Dimension of D_k(H).
    Dk {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        k: usize,
    },
    /// Hall normal form of a bracket expression.
    Normal {
        #[arg(long)]
        g: usize,
        #[arg(long)]
        expr: String,
    },
}

#[derive(Subcommand, Debug)]
pub enum TreesCmd {
    Enumerate {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        trivalent: bool,
    },
    Boundary {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        check_square: bool,
    },
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(out, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(&cli, out) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            let _ = writeln!(out, "error: {e}");
            2
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let mut w = |s: String| writeln!(out, "{s}").map_err(io);
    match &cli.command {
        Command::Replicate { convention } => {
            let t = replicate(&RunConfig { conventions: convention.list(), ..Default::default() });
            match cli.format {
                Format::Json => w(t.to_json())?,
                Format::Text => w(t.to_text())?,
            }
            Ok(t.verdict)
        }
        Command::Y(c) => y_cmd(c, &mut w),
        Command::Gw(c) => gw_cmd(c, &mut w),
        Command::Ainf(c) => ainf_cmd(c, cli, &mut w),
        Command::Massey(c) => massey_cmd(c, &mut w),
        Command::Johnson(c) => johnson_cmd(c, &mut w),
        Command::Trees(c) => trees_cmd(c, &mut w),
    }
}

type Out<'a> = dyn FnMut(String) -> Result<()> + 'a;

fn y_cmd(c: &YCmd, w: &mut Out) -> Result<bool> {
    let table = y::build_y()?;
    let classes = || -> Result<Vec<_>> { ["F", "T", "R"].iter().map(|n| y::y_class(n)).collect() };
    match c {
        YCmd::Tables { pd } => {
            let conv = match pd.as_str() {
                "product-first" => PdConvention::ProductFirst,
                "product-last" => PdConvention::ProductLast,
                other => return Err(Error::Parse(format!("unknown pd convention {other:?}"))),
            };
            let stars = y::load_star_table(&table.target.basis)?;
            let cls = classes()?;
            let mut ok = true;
            for a in &cls {
                let m = y::reproduce_tables(&table, &stars, std::slice::from_ref(a), conv)?;
                w(format!("class {}: {} mismatching entries", y::y_class_name(a), m.len()))?;
                for x in &m {
                    w(format!("    {} * {}: table {} computed {}", x.x, x.z, x.table, x.computed))?;
                }
                ok &= m.is_empty();
            }
            let comm = y::table_commutativity_defects(&table.target, &stars);
            w(format!("graded commutativity defects in the literal tables: {}", comm.len()))?;
            Ok(ok)
        }
        YCmd::PdRoundtrip => {
            let (n, bad) = y::pd_round_trip(&table, &classes()?)?;
            w(format!("{n} stored invariants checked, {} failures", bad.len()))?;
            for b in &bad {
                w(format!("    {}: stored {} recovered {}", b.invariant, b.stored, b.recovered))?;
            }
            Ok(bad.is_empty())
        }
        YCmd::Derive => {
            let vals = y::derivation_chain(&table)?;
            let bad = vals.iter().filter(|v| !v.ok).count();
            for v in vals.iter().filter(|v| !v.ok).take(20) {
                w(format!("    {} {}: got {} expected {}", v.step, v.invariant, v.value, v.expected))?;
            }
            w(format!("{} derived values, {bad} disagree", vals.len()))?;
            Ok(bad == 0)
        }
        YCmd::Cone { phi } => {
            let basis = &table.target.basis;
            let m = match phi {
                Some(p) => y::parse_matrix(&std::fs::read_to_string(p)?, basis.len())?,
                None => crate::linalg::Matrix::identity(basis.len()),
            };
            let cone = y::mapping_cone_cohomology(basis, &m)?;
            w(format!("betti {:?}", cone.dims))?;
            Ok(true)
        }
        YCmd::Extension => {
            let m = y::YModel::from_table(table)?;
            let r = y::verify_extension(&m.torus.base, &m.torus.algebra, &m.torus.t, &m.torus.j, &m.products, &m.torus_products, &m.ring.truncation)?;
            for s in &r.malformed {
                w(format!("malformed: {s}"))?;
            }
            for v in &r.violations {
                w(format!("axiom {} ({}): {}", v.axiom, v.labels.join(", "), v.detail))?;
            }
            w(format!("{} violations", r.violations.len()))?;
            Ok(r.is_empty())
        }
    }
}

fn gw_cmd(c: &GwCmd, w: &mut Out) -> Result<bool> {
    let table = y::build_y()?;
    match c {
        GwCmd::Eval { class, inputs } => {
            let a = y::y_class(class)?;
            let labels: Vec<&str> = inputs.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            let v = table.lookup(&a, &labels)?;
            w(format!("GW[{}]({}) = {}", y::y_class_name(&a), labels.join(","), crate::rational::render(&v)))?;
            Ok(true)
        }
        GwCmd::Check => {
            let alg_bad: Vec<_> = table.target.verify().into_iter().filter(|v| !v.axiom.starts_with("pairing")).collect();
            let div: Vec<_> = table.divisor_report().into_iter().filter(|d| !d.consistent()).collect();
            w(format!("{} stored invariants; {} algebra violations; {} divisor inconsistencies", table.entries.len(), alg_bad.len(), div.len()))?;
            for d in &div {
                w(format!("    {}: stored {} peeled {:?}", d.label, crate::rational::render(&d.stored), d.peeled))?;
            }
            Ok(alg_bad.is_empty() && div.is_empty())
        }
    }
}

fn ainf_cmd(c: &AinfCmd, cli: &Cli, w: &mut Out) -> Result<bool> {
    match c {
        AinfCmd::Check { file } => {
            let s = AInfinityStructure::parse(&std::fs::read_to_string(file)?)?;
            let r = ainfty_check(&s);
            for x in r.iter().take(20) {
                w(format!("energy {} inputs ({}) residual {}", x.energy, x.inputs.join(", "), x.residual))?;
            }
            w(format!("{} residuals", r.len()))?;
            Ok(r.is_empty())
        }
        AinfCmd::Suite { cochains, gauges, homotopies } => {
            let mut algs = small_algebras();
            algs.push(crate::ainf::exterior_algebra(&["x", "y", "z"]));
            algs.push(GradedAlgebra::parse(&data::load("surface_algebra.txt")?)?);
            let r = property_suite(cli.seed, &algs, *cochains, *gauges, *homotopies)?;
            match cli.format {
                Format::Json => w(serde_json::to_string_pretty(&r).map_err(|e| Error::Internal(e.to_string()))?)?,
                Format::Text => {
                    w(format!("seed {}", cli.seed))?;
                    w(format!("dg packings           {}/{}", r.dg_packings.0, r.dg_packings.1))?;
                    w(format!("d^2 = 0               {}/{}", r.square_zero.0, r.square_zero.1))?;
                    w(format!("gauge invariance      {}/{}", r.gauge_invariance.0, r.gauge_invariance.1))?;
                    w(format!("transfer independence {}/{}", r.transfer_independence.0, r.transfer_independence.1))?;
                }
            }
            Ok(r.passed())
        }
    }
}

fn massey_cmd(c: &MasseyCmd, w: &mut Out) -> Result<bool> {
    match c {
        MasseyCmd::Classical { fixture, inputs } => {
            let s = match fixture.as_str() {
                "heisenberg" => heisenberg()?,
                "formal" => formal_fixture()?,
                other => return Err(Error::Invalid(format!("unknown fixture {other:?}"))),
            };
            let xs: Vec<&str> = inputs.split(',').map(str::trim).collect();
            if xs.len() != 3 {
                return Err(Error::Parse("expected three inputs".into()));
            }
            let v: Vec<_> = xs.iter().map(|x| s.basis.parse_element(x)).collect::<Result<_>>()?;
            let c = classical_massey(&s, &v[0], &v[1], &v[2])?;
            let cert = coset_nontrivial(&c);
            w(format!("<{}> = {} (ambiguity rank {}), nontrivial = {}", xs.join(", "), c.render(), c.ambiguity.rank(), cert.nontrivial))?;
            Ok(true)
        }
        MasseyCmd::Main { convention } => {
            let t = replicate(&RunConfig { conventions: convention.list(), ..Default::default() });
            w(t.to_text())?;
            Ok(t.verdict)
        }
        MasseyCmd::Surface { convention } => {
            let mut ok = true;
            for conv in convention.list() {
                let (c, cert) = surface_matrix_massey(conv)?;
                w(format!("{}: Theta = {}, ambiguity rank {}, nontrivial = {}", conv.name(), c.render(), c.ambiguity.rank(), cert.nontrivial))?;
                ok &= cert.nontrivial;
            }
            Ok(ok)
        }
    }
}

fn johnson_cmd(c: &JohnsonCmd, w: &mut Out) -> Result<bool> {
    match c {
        JohnsonCmd::Tau1 { g, h } => {
            let m = SymplecticModule::new(*g)?;
            let raw = johnson::tau1_bp_raw(&m, *h)?;
            let t = johnson::tau1_bp(&m, *h)?;
            w(format!("tau1 = {}", johnson::render_raw(&m, &raw)))?;
            w(format!("     = {}", t.render(&m)))?;
            let ok = johnson::bracket_map(&t).is_zero() && t.is_integral();
            w(format!("in D_2: {ok}"))?;
            Ok(ok)
        }
        JohnsonCmd::Tau2 { g, h } => {
            let m = SymplecticModule::new(*g)?;
            let t = johnson::tau2_bscc(&m, *h)?;
            let img = johnson::minus_omega_squared_image(&m, *h);
            w(format!("tau2 = {}", t.render(&m)))?;
            let ok = t == img && johnson::bracket_map(&t).is_zero();
            w(format!("equals image of -omega (x) omega: {}", t == img))?;
            Ok(ok)
        }
        JohnsonCmd::Dk { g, k } => {
            let m = SymplecticModule::new(*g)?;
            w(johnson::kernel_dk(&m, *k).to_string())?;
            Ok(true)
        }
        JohnsonCmd::Normal { g, expr } => {
            let m = SymplecticModule::new(*g)?;
            w(johnson::lie_normal_form(&m, expr)?.render(&m))?;
            Ok(true)
        }
    }
}

fn trees_cmd(c: &TreesCmd, w: &mut Out) -> Result<bool> {
    match c {
        TreesCmd::Enumerate { d, trivalent } => {
            if *d < 2 {
                return Err(Error::Invalid("need d >= 2".into()));
            }
            let ts = if *trivalent { trees::trivalent_trees(*d) } else { trees::enumerate_stable_trees(*d) };
            for t in &ts {
                w(t.canonical())?;
            }
            w(format!("{} trees", ts.len()))?;
            Ok(true)
        }
        TreesCmd::Boundary { d, check_square } => {
            let cx = trees::signed_boundary(*d)?;
            w(format!("cells by dimension {:?}, euler characteristic {}", cx.cell_counts(), cx.euler_characteristic()))?;
            let mut ok = cx.euler_characteristic() == 1;
            if *check_square {
                let bad = cx.square_defects();
                w(format!("nonzero entries of d^2: {bad}"))?;
                ok &= bad == 0;
            }
            Ok(ok)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String) {
        let mut buf = Vec::new();
        let code = run(std::iter::once("qmassey").chain(args.iter().copied()), &mut buf);
        (code, String::from_utf8(buf).unwrap())
    }

    #[test]
    fn subcommands() {
        let (c, o) = call(&["johnson", "tau1", "--g", "2", "--h", "1"]);
        assert_eq!(c, 0, "{o}");
        assert!(o.contains("B1⊗(B2∧A1) - A1⊗(B2∧B1) + B2⊗(A1∧B1)"));
        let (c, o) = call(&["trees", "boundary", "--d", "4", "--check-square"]);
        assert_eq!(c, 0, "{o}");
        let (c, o) = call(&["trees", "enumerate", "--d", "4"]);
        assert!(c == 0 && o.contains("11 trees"));
        let (c, o) = call(&["gw", "eval", "--class", "F", "--inputs", "ua1,ub1,u"]);
        assert!(c == 0 && o.ends_with("= 1\n"), "{o}");
        let (c, _) = call(&["massey", "classical", "--fixture", "formal", "--inputs", "x,x,x"]);
        assert_eq!(c, 0);
        let (c, _) = call(&["frobnicate"]);
        assert_eq!(c, 2);
    }

    #[test]
    fn replicate_json_is_stable() {
        let (c1, a) = call(&["--format", "json", "replicate"]);
        let (c2, b) = call(&["--format", "json", "replicate"]);
        assert_eq!(a, b);
        assert_eq!(c1, c2);
        assert_eq!(c1 == 0, a.contains("\"verdict\": true"));
    }
}
