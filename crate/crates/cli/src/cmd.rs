use std::fs;
use std::path::{Path, PathBuf};

use addrccz::address::{build_rs_addressable, single_index_schedule};
use addrccz::codes::MatF;
use addrccz::concat::{pipeline_theorem_6_1, pipeline_theorem_6_2, qudit_to_qubit, QubitCssCode};
use addrccz::css::{build_css_with, DistanceOptions};
use addrccz::designed::rs_designed;
use addrccz::gates::{GateFamily, GateSchedule};
use addrccz::ortho::{check_orthogonality, rs_addressable_matrix};
use addrccz::tri_t::{clifford_correction, rm_tri_matrix, verify_t_addressing, CliffordGate, Correction};
use addrccz::verify::{
    verify_exhaustive, verify_identities, verify_sampled, CodeSpace, Expanded, IdentityTarget, LogicalSpec, Mode,
    PhaseCircuit, Verdict, VerifyReport, DEFAULT_EXHAUSTIVE_BUDGET, DEFAULT_TRIALS,
};
use addrccz::{Elem, FieldCtx};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bundle::{
    read_schedule, schedule_to_text, Bundle, CheckSummary, DesignedPayload, Loaded, OrthoPayload, QubitPayload,
    StageSummary,
};

#[derive(Parser)]
#[command(name = "addrccz", version, about = "Addressable CCZ codes: build, schedule, verify")]
pub struct Cli {
    #[command(flatten)]
    pub run: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every command. The seed defaults to 0 so runs are
/// reproducible without flags.
#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Enumeration budget for exhaustive checks.
    #[arg(long, global = true, env = "ADDRCCZ_BUDGET", default_value_t = DEFAULT_EXHAUSTIVE_BUDGET as u64,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub budget: u64,
    /// Trials for sampled checks.
    #[arg(long, global = true, default_value_t = DEFAULT_TRIALS, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when absent).
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum Command {
    /// Build the Reed-Solomon addressable code over GF(n²).
    BuildRs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Orthogonality witnesses.
    #[command(subcommand)]
    Ortho(OrthoCmd),
    /// Designed intra-block W code from an RS base.
    Designed {
        #[arg(long, default_value_t = 7)]
        t: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Qubit codes by concatenation.
    #[command(subcommand)]
    Concat(ConcatCmd),
    /// Addressable triorthogonal matrices and the T gate.
    #[command(subcommand, name = "tri-t")]
    TriT(TriCmd),
    /// Gate schedules for an RS or witness bundle.
    #[command(subcommand)]
    Schedule(ScheduleCmd),
    /// Check a schedule against a logical gate.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Convert or extract parts of a bundle.
    Export {
        #[arg(long)]
        input: PathBuf,
        #[command(subcommand)]
        what: ExportWhat,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
pub enum OrthoCmd {
    /// RS-derived addressable strong witness on the first N field elements.
    Rs {
        #[arg(long)]
        t: u32,
        #[arg(long)]
        n_points: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        ell: usize,
    },
    /// Re-evaluate the witness sums of an ortho bundle.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum StageArg {
    Q1,
    Q2,
    Q3,
    #[value(name = "q3-prime")]
    Q3Prime,
}

#[derive(Subcommand)]
pub enum ConcatCmd {
    /// RS base, uniform gauge, degree-3 MFE.
    T61 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, value_enum, default_value_t = StageArg::Q2)]
        stage: StageArg,
        /// Also write the CCZ schedule for the chosen stage here.
        #[arg(long)]
        schedule_out: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', default_value = "0,0,0")]
        addresses: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        blocks: Vec<usize>,
    },
    /// Designed W base, staggered gauge, Ω-fold duplication.
    T62 {
        #[arg(long, default_value_t = 7)]
        t: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = StageArg::Q2)]
        stage: StageArg,
        #[arg(long)]
        schedule_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        triple: usize,
    },
}

#[derive(Subcommand)]
pub enum TriCmd {
    /// Witness from RM(1, m) punctured on k points.
    Build {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
    },
    /// Evaluate the triorthogonality predicate.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
    /// Exhaustive Z_8 check of the corrected T gate on one index.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        address: usize,
    },
}

#[derive(Args)]
pub struct TripleArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    addresses: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    gamma: u32,
}

#[derive(Subcommand)]
pub enum ScheduleCmd {
    /// CCZ on three logical qudits of one block.
    Intra(TripleArgs),
    /// CCZ across blocks.
    Inter {
        #[command(flatten)]
        triple: TripleArgs,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        blocks: Vec<usize>,
    },
    /// Triples sharing their Δ pair, given as a,b,c:gamma.
    Merged {
        #[arg(long)]
        code: PathBuf,
        #[arg(long = "triple", required = true)]
        triples: Vec<String>,
        #[arg(long, value_delimiter = ',', default_value = "0,1,2")]
        blocks: Vec<usize>,
    },
    /// Transversal gate from a witness: one application per physical index.
    SingleIndex {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        address: usize,
        /// CCZ, C<l>Z, U<l> or W.
        #[arg(long, default_value = "CCZ")]
        family: String,
        #[arg(long, default_value_t = 1)]
        beta: u32,
    },
}

#[derive(Args)]
pub struct VerifyArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    schedule: PathBuf,
    /// Target gate: CCZ, C<l>Z, U<l> or W.
    #[arg(long, default_value = "CCZ")]
    gate: String,
    #[arg(long, default_value_t = 1)]
    gamma: u32,
    /// Logical targets as block:index, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    targets: Vec<String>,
    /// Code blocks; defaults to the blocks the schedule touches.
    #[arg(long)]
    blocks: Option<usize>,
}

#[derive(Subcommand)]
pub enum VerifyCmd {
    Exhaustive(VerifyArgs),
    Sampled(VerifyArgs),
    /// Algebraic identities behind a bundle's gates.
    Identity {
        #[arg(long)]
        code: PathBuf,
        /// Address tuple for RS bundles.
        #[arg(long, value_delimiter = ',')]
        addresses: Vec<usize>,
    },
}

#[derive(Subcommand)]
pub enum ExportWhat {
    /// The qubit CSS code obtained through the self-dual basis.
    Qubit,
    /// One matrix of the bundle.
    Matrix {
        /// g1, g0, zdual, h (qudit codes); hx, hz, lx, lz (qubit codes); g, b (tri-t).
        #[arg(long)]
        name: String,
    },
}

/// Process outcome when no error occurred.
pub enum Outcome {
    Pass,
    Fail,
}

fn emit(run: &RunConfig, text: &str) -> Result<()> {
    match &run.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data serializes");
    s.push('\n');
    s
}

fn elem(f: &FieldCtx, v: u32) -> Result<Elem> {
    Ok(f.elem(v)?)
}

fn three(v: &[usize], what: &str) -> Result<[usize; 3]> {
    <[usize; 3]>::try_from(v).map_err(|_| anyhow::anyhow!("{what} needs exactly three entries, got {}", v.len()))
}

fn outcome(passed: bool) -> Outcome {
    if passed {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let run = &cli.run;
    match &cli.command {
        Command::BuildRs { n, m, k, format } => {
            let rs = build_rs_addressable(*n, *m, *k)?;
            match format {
                Format::Json => emit(run, &Bundle::new("rs_addressable", None, &rs)?.to_json())?,
                Format::Text => emit(
                    run,
                    &format!(
                        "[[{},{},>={}]]_{} (distance bound: {})\n",
                        rs.code.n,
                        rs.code.k,
                        rs.code.d_lower,
                        rs.field.q(),
                        serde_json::to_value(rs.code.d_provenance)?.as_str().unwrap_or("?")
                    ),
                )?,
            }
            Ok(Outcome::Pass)
        }
        Command::Ortho(OrthoCmd::Rs { t, n_points, m, k, ell }) => {
            let f = FieldCtx::new(*t)?;
            let (g, witness) = rs_addressable_matrix(&f, *n_points, *m, *k, *ell)?;
            let c = check_orthogonality(&g, *k, &witness)?;
            let n = n_points - k;
            let opts =
                DistanceOptions { bound_g: Some(n + 1 - m), bound_g0_dual: Some(m - k + 1), ..Default::default() };
            let code = build_css_with(&g, *k, &opts)?;
            let check = CheckSummary { checked: c.checked, passed: c.passed() };
            emit(run, &Bundle::new("ortho", None, &OrthoPayload { g, k: *k, witness, code, check })?.to_json())?;
            Ok(outcome(c.passed()))
        }
        Command::Ortho(OrthoCmd::Check { input }) => {
            let Loaded::Ortho(o) = Bundle::read(input)?.load()? else { bail!("expected an ortho bundle") };
            let r = verify_identities(IdentityTarget::Ortho { g: &o.g, k: o.k, witness: &o.witness })?;
            emit(run, &json(&r))?;
            Ok(outcome(r.passed()))
        }
        Command::Designed { t, n, m, k } => {
            let d = rs_designed(*t, *n, *m, *k)?;
            let c = d.check_extended_orthogonality();
            let p = DesignedPayload {
                t: *t,
                n: *n,
                m: *m,
                k: *k,
                k_prime: d.k_prime,
                m_prime: d.m_prime(),
                code: d.code.clone(),
                lambdas: d.lambdas.clone(),
                check: CheckSummary { checked: c.checked, passed: c.passed() },
            };
            emit(run, &Bundle::new("designed", None, &p)?.to_json())?;
            Ok(outcome(c.passed()))
        }
        Command::Concat(c) => concat(run, c),
        Command::TriT(c) => tri_t(run, c),
        Command::Schedule(c) => {
            let s = schedule(c)?;
            emit(run, &schedule_to_text(&s))?;
            Ok(Outcome::Pass)
        }
        Command::Verify(VerifyCmd::Exhaustive(a)) => verify(run, a, Mode::Exhaustive),
        Command::Verify(VerifyCmd::Sampled(a)) => verify(run, a, Mode::Sampled),
        Command::Verify(VerifyCmd::Identity { code, addresses }) => {
            let r = identity(&Bundle::read(code)?.load()?, addresses)?;
            emit(run, &json(&r))?;
            Ok(outcome(r.passed()))
        }
        Command::Export { input, what } => {
            let loaded = Bundle::read(input)?.load()?;
            match what {
                ExportWhat::Qubit => {
                    let Some(css) = loaded.css() else { bail!("qubit export needs a qudit code bundle") };
                    let q = qudit_to_qubit(css, &css.field.self_dual_basis())?;
                    let stages = vec![StageSummary::of(&q)];
                    emit(run, &Bundle::new("qubit_css", q.note.clone(), &QubitPayload { code: q, stages })?.to_json())?;
                }
                ExportWhat::Matrix { name } => emit(run, &json(&matrix(&loaded, name)?))?,
            }
            Ok(Outcome::Pass)
        }
    }
}

fn sparse_to_dense(rows: &[Vec<usize>], n: usize) -> Result<MatF> {
    let f2 = FieldCtx::new(1)?;
    let mut m = MatF::zeros(&f2, rows.len(), n);
    for (r, supp) in rows.iter().enumerate() {
        for &c in supp {
            m.set(r, c, Elem::ONE);
        }
    }
    Ok(m)
}

fn matrix(loaded: &Loaded, name: &str) -> Result<MatF> {
    if let Some(c) = loaded.css() {
        return Ok(match name {
            "g1" => c.g1.clone(),
            "g0" => c.g0.clone(),
            "zdual" => c.zdual.clone(),
            "h" => c.h.clone(),
            _ => bail!("unknown matrix {name:?}; qudit codes have g1, g0, zdual, h"),
        });
    }
    match loaded {
        Loaded::Qubit(q) => {
            let c: &QubitCssCode = &q.code;
            Ok(match name {
                "hx" => c.hx.clone(),
                "lx" => c.lx.clone(),
                "hz" => sparse_to_dense(&c.hz, c.n)?,
                "lz" => sparse_to_dense(&c.lz, c.n)?,
                _ => bail!("unknown matrix {name:?}; qubit codes have hx, hz, lx, lz"),
            })
        }
        Loaded::Tri(w) => Ok(match name {
            "g" => w.g.clone(),
            "b" => w.b.clone(),
            _ => bail!("unknown matrix {name:?}; tri-t bundles have g, b"),
        }),
        _ => unreachable!("qudit bundles handled above"),
    }
}

fn concat(run: &RunConfig, c: &ConcatCmd) -> Result<Outcome> {
    let (code, stages, sched) = match c {
        ConcatCmd::T61 { n, m, k, stage, schedule_out, addresses, blocks } => {
            let p = pipeline_theorem_6_1(*n, *m, *k)?;
            let stages = [&p.q1, &p.q2, &p.q3, &p.q3_prime].map(StageSummary::of).to_vec();
            let [a, b, cc] = three(addresses, "--addresses")?;
            let blocks = three(blocks, "--blocks")?;
            let code = match stage {
                StageArg::Q1 => p.q1.clone(),
                StageArg::Q2 => p.q2.clone(),
                StageArg::Q3 => p.q3.clone(),
                StageArg::Q3Prime => p.q3_prime.clone(),
            };
            let sched = match schedule_out {
                None => None,
                Some(path) => {
                    let s = match stage {
                        StageArg::Q1 | StageArg::Q2 => p.qudit_ccz(a, b, cc, blocks)?,
                        StageArg::Q3 => p.ccz_q3(a, b, cc, blocks)?,
                        StageArg::Q3Prime => p.ccz_q3_prime(a, b, cc, blocks)?,
                    };
                    Some((path.clone(), s))
                }
            };
            (code, stages, sched)
        }
        ConcatCmd::T62 { t, n, m, k, stage, schedule_out, triple } => {
            let p = pipeline_theorem_6_2(*t, *n, *m, *k)?;
            let stages = [&p.q1, &p.q2, &p.q3].map(StageSummary::of).to_vec();
            let code = match stage {
                StageArg::Q1 => p.q1.clone(),
                StageArg::Q2 => p.q2.clone(),
                StageArg::Q3 => p.q3.clone(),
                StageArg::Q3Prime => bail!("the designed pipeline has no q3-prime stage"),
            };
            let sched = match schedule_out {
                None => None,
                Some(path) => {
                    let s = match stage {
                        StageArg::Q3 => p.ccz_q3(*triple)?,
                        _ => p.w_q2(*triple)?,
                    };
                    Some((path.clone(), s))
                }
            };
            (code, stages, sched)
        }
    };
    if let Some((path, s)) = sched {
        fs::write(&path, schedule_to_text(&s)).with_context(|| format!("writing {}", path.display()))?;
    }
    let note = code.note.clone();
    emit(run, &Bundle::new("qubit_css", note, &QubitPayload { code, stages })?.to_json())?;
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct TriVerifyOutput {
    note: Option<String>,
    report: VerifyReport,
    correction: Correction,
    gates: Vec<CliffordGate>,
}

fn tri_t(run: &RunConfig, c: &TriCmd) -> Result<Outcome> {
    match c {
        TriCmd::Build { m, k } => {
            let w = rm_tri_matrix(*m, *k)?;
            emit(run, &Bundle::new("tri_t", w.note.clone(), &w)?.to_json())?;
            Ok(Outcome::Pass)
        }
        TriCmd::Check { input } => {
            let loaded = Bundle::read(input)?.load()?;
            let r = identity(&loaded, &[])?;
            emit(run, &json(&r))?;
            Ok(outcome(r.passed()))
        }
        TriCmd::Verify { input, address } => {
            let Loaded::Tri(w) = Bundle::read(input)?.load()? else { bail!("expected a tri_t bundle") };
            let report = verify_t_addressing(&w, *address, run.budget as u128)?;
            let correction = clifford_correction(&w, *address)?;
            let gates = correction.gates();
            let passed = report.passed();
            emit(run, &json(&TriVerifyOutput { note: w.note.clone(), report, correction, gates }))?;
            Ok(outcome(passed))
        }
    }
}

fn rs_bundle(path: &Path) -> Result<Box<addrccz::address::AddressableRsCode>> {
    match Bundle::read(path)?.load()? {
        Loaded::Rs(r) => Ok(r),
        _ => bail!("{} is not an rs_addressable bundle", path.display()),
    }
}

fn schedule(c: &ScheduleCmd) -> Result<GateSchedule> {
    match c {
        ScheduleCmd::Intra(t) => {
            let rs = rs_bundle(&t.code)?;
            let [a, b, cc] = three(&t.addresses, "--addresses")?;
            Ok(rs.intra_ccz_schedule(a, b, cc, elem(&rs.field, t.gamma)?)?)
        }
        ScheduleCmd::Inter { triple: t, blocks } => {
            let rs = rs_bundle(&t.code)?;
            let [a, b, cc] = three(&t.addresses, "--addresses")?;
            Ok(rs.inter_ccz_schedule(a, b, cc, elem(&rs.field, t.gamma)?, three(blocks, "--blocks")?)?)
        }
        ScheduleCmd::Merged { code, triples, blocks } => {
            let rs = rs_bundle(code)?;
            let parsed = triples
                .iter()
                .map(|s| {
                    let (abc, g) = s.split_once(':').unwrap_or((s, "1"));
                    let v: Vec<usize> = abc.split(',').map(str::parse).collect::<Result<_, _>>()?;
                    let [a, b, cc] = three(&v, "--triple")?;
                    Ok((a, b, cc, elem(&rs.field, g.parse()?)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(rs.merged_triples_schedule(&parsed, three(blocks, "--blocks")?)?)
        }
        ScheduleCmd::SingleIndex { code, address, family, beta } => {
            let fam: GateFamily = family.parse()?;
            match Bundle::read(code)?.load()? {
                Loaded::Ortho(o) => {
                    let b = elem(o.g.field(), *beta)?;
                    Ok(single_index_schedule(&o.g, o.k, &o.witness, *address, &fam, b)?)
                }
                Loaded::Rs(rs) => {
                    let b = elem(&rs.field, *beta)?;
                    Ok(single_index_schedule(&rs.generator(), rs.k, &rs.witness(), *address, &fam, b)?)
                }
                _ => bail!("single-index schedules need an ortho or rs_addressable bundle"),
            }
        }
    }
}

fn parse_targets(v: &[String]) -> Result<Vec<(usize, usize)>> {
    v.iter()
        .map(|s| {
            let (b, i) = s.split_once(':').with_context(|| format!("target {s:?} is not block:index"))?;
            Ok((b.trim().parse()?, i.trim().parse()?))
        })
        .collect()
}

fn verify(run: &RunConfig, a: &VerifyArgs, mode: Mode) -> Result<Outcome> {
    let loaded = Bundle::read(&a.code)?.load()?;
    let code = loaded.code_space()?;
    let s = read_schedule(&a.schedule)?;
    let f = code.field().clone();
    let fam: GateFamily = a.gate.parse()?;
    let spec = LogicalSpec::on(fam.poly(&f, elem(&f, a.gamma)?), &parse_targets(&a.targets)?)?;
    let blocks = a.blocks.unwrap_or_else(|| s.blocks()).max(1);
    let codes: Vec<&dyn CodeSpace> = vec![code; blocks];
    let basis = s.field().self_dual_basis();
    let expanded = Expanded::new(&s, &basis);
    let circuit: &dyn PhaseCircuit = if s.field() == &f {
        &s
    } else if f.q() == 2 {
        &expanded
    } else {
        bail!("schedule over GF({}) does not act on a code over GF({})", s.field().q(), f.q());
    };
    let r = match mode {
        Mode::Exhaustive => verify_exhaustive(&codes, circuit, &spec, run.budget as u128)?,
        _ => verify_sampled(&codes, circuit, &spec, run.trials, run.seed)?,
    };
    emit(run, &json(&r))?;
    Ok(outcome(r.passed()))
}

fn identity(loaded: &Loaded, addresses: &[usize]) -> Result<VerifyReport> {
    Ok(match loaded {
        Loaded::Rs(rs) => {
            if addresses.is_empty() {
                bail!("RS identities need --addresses");
            }
            verify_identities(IdentityTarget::RsShift { code: rs, addresses })?
        }
        Loaded::Ortho(o) => verify_identities(IdentityTarget::Ortho { g: &o.g, k: o.k, witness: &o.witness })?,
        Loaded::Designed(d) => {
            let code = rs_designed(d.t, d.n, d.m, d.k)?;
            verify_identities(IdentityTarget::Designed(&code))?
        }
        Loaded::Tri(w) => {
            let passed = w.check();
            let m = w.g.rows() as u64;
            VerifyReport {
                mode: Mode::Identity,
                checked: m * m * m * w.k as u64,
                failure_count: u64::from(!passed),
                failures: Vec::new(),
                coset_constant: None,
                verdict: if passed { Verdict::Pass } else { Verdict::Fail },
            }
        }
        Loaded::Qubit(_) => bail!("qubit bundles carry no identity certificate"),
    })
}
