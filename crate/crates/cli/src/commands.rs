//! Verb dispatch and implementations. Every verb builds a `Report`
//! echoing its inputs and seed; mathematical negative answers exit with
//! code 2, usage and internal errors with 1.

use crate::grammar;
use crate::json::{self, DisplayJson, MorphismJson, Provenance, Report};
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::PathBuf;
use wittcalc_core::display::{self, Display, Morphism};
use wittcalc_core::error::Error;
use wittcalc_core::frame::Frame;
use wittcalc_core::isogeny;
use wittcalc_core::mat::Mat;
use wittcalc_core::moduli;
use wittcalc_core::ring::Ring;
use wittcalc_core::witt::WittVector;
use wittcalc_core::{deform, selftest};

pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Ctx {
    command: String,
    inputs: Value,
    seed: u64,
    started: std::time::Instant,
}

impl Ctx {
    fn report(&self, status: &str, result: Value) -> Report {
        Report {
            status: status.into(),
            result,
            provenance: Provenance {
                command: self.command.clone(),
                inputs: self.inputs.clone(),
                seed: self.seed,
                version: env!("CARGO_PKG_VERSION").into(),
            },
            timing_ms: self.started.elapsed().as_millis(),
        }
    }
}

fn is_obstruction(e: &Error) -> bool {
    matches!(
        e,
        Error::ObstructionNonzero(_)
            | Error::ZerothCoordinateObstruction(_)
            | Error::NotDivisible
            | Error::NotDivisibleConsistently
            | Error::NoSolution
    )
}

/// Flag parser: `--key value` pairs after the verb words.
pub struct Args {
    positional: Vec<String>,
    flags: Vec<(String, String)>,
}

impl Args {
    pub fn parse(argv: &[String]) -> Result<Args, String> {
        let mut positional = Vec::new();
        let mut flags = Vec::new();
        let mut it = argv.iter().peekable();
        while let Some(a) = it.next() {
            if let Some(key) = a.strip_prefix("--") {
                let val = it
                    .next()
                    .ok_or_else(|| format!("flag --{key} needs a value"))?;
                flags.push((key.to_string(), val.clone()));
            } else {
                positional.push(a.clone());
            }
        }
        Ok(Args { positional, flags })
    }

    fn flag(&self, key: &str) -> Option<&str> {
        self.flags
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    fn flag_u64(&self, key: &str) -> Result<Option<u64>, String> {
        self.flag(key)
            .map(|v| v.parse().map_err(|_| format!("bad --{key}")))
            .transpose()
    }

    fn require(&self, key: &str) -> Result<&str, String> {
        self.flag(key).ok_or_else(|| format!("missing --{key}"))
    }
}

const USAGE: &str = "usage: wittcalc <verb> [subverb] [flags]
  witt eval --in FILE|--json J        evaluate a Witt vector operation
  witt identities --ring R --n N      spot-check the standard identities
  display check|nilpotency|det --in FILE
  isogeny height|invert|divide-p --in FILE
  solve homog|inhom --in FILE
  deform lift|tangent --in FILE
  lift extend --in FILE --precision N
  lift iso --in FILE
  moduli enumerate --base FILE --r R --s S [--csv FILE] [--threads T]
  selftest <suite>|all [--seed S]     suites: witt-ring lemma-homogeneous
      lemma-inhomogeneous det-functor p-torsionfree divide-invert
      extend-adjugate deformation moduli-counts lifting-isomorphism
  fixtures generate|verify --dir DIR [--seed S]
flags: --seed S (default 20240), --margin M, --emax E, --threads T
exit codes: 0 ok, 2 mathematical obstruction, 1 usage or internal error";

pub fn run(argv: &[String]) -> Outcome {
    match run_inner(argv) {
        Ok((code, report)) => Outcome {
            exit_code: code,
            stdout: serde_json::to_string_pretty(&report).unwrap() + "\n",
            stderr: String::new(),
        },
        Err(msg) => Outcome {
            exit_code: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n{USAGE}\n"),
        },
    }
}

fn load_input(args: &Args) -> Result<Value, String> {
    if let Some(inline) = args.flag("json") {
        return serde_json::from_str(inline).map_err(|e| format!("bad inline JSON: {e}"));
    }
    let path = args.require("in")?;
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
    serde_json::from_str(&text).map_err(|e| format!("{path}: {e}"))
}

fn run_inner(argv: &[String]) -> Result<(i32, Report), String> {
    let args = Args::parse(argv)?;
    if args.positional.is_empty() {
        return Err("no verb given".into());
    }
    let seed = args.flag_u64("seed")?.unwrap_or(20240);
    let verb = args.positional[0].as_str();
    let sub = args.positional.get(1).map(|s| s.as_str()).unwrap_or("");
    let command = if sub.is_empty() {
        verb.to_string()
    } else {
        format!("{verb} {sub}")
    };
    let mut ctx = Ctx {
        command,
        inputs: Value::Null,
        seed,
        started: std::time::Instant::now(),
    };
    match (verb, sub) {
        ("witt", "eval") => witt_eval(&args, &mut ctx),
        ("witt", "identities") => witt_identities(&args, &mut ctx),
        ("display", "check") | ("display", "det") | ("display", "nilpotency") => {
            display_cmd(&args, &mut ctx, sub)
        }
        ("isogeny", "height") | ("isogeny", "invert") | ("isogeny", "divide-p") => {
            isogeny_cmd(&args, &mut ctx, sub)
        }
        ("solve", "homog") | ("solve", "inhom") => solve_cmd(&args, &mut ctx, sub),
        ("deform", "lift") | ("deform", "tangent") => deform_cmd(&args, &mut ctx, sub),
        ("lift", "extend") | ("lift", "iso") => lift_cmd(&args, &mut ctx, sub),
        ("moduli", "enumerate") => moduli_cmd(&args, &mut ctx),
        ("selftest", name) if !name.is_empty() => selftest_cmd(&mut ctx, name, seed),
        ("fixtures", "generate") | ("fixtures", "verify") => fixtures_cmd(&args, &mut ctx, sub),
        _ => Err(format!("unknown verb: {verb} {sub}")),
    }
}

fn math_or_err(ctx: &Ctx, e: Error) -> Result<(i32, Report), String> {
    if is_obstruction(&e) {
        Ok((
            2,
            ctx.report("obstruction", json!({ "reason": e.to_string() })),
        ))
    } else {
        Err(e.to_string())
    }
}

// ----- witt -----

#[derive(Deserialize)]
struct WittEvalInput {
    ring: String,
    op: String,
    #[serde(default)]
    args: Vec<Vec<String>>,
    #[serde(default)]
    element: Option<String>,
    #[serde(default)]
    k: Option<i64>,
    #[serde(default)]
    n: Option<usize>,
}

fn witt_eval(args: &Args, ctx: &mut Ctx) -> Result<(i32, Report), String> {
    let input = load_input(args)?;
    ctx.inputs = input.clone();
    let input: WittEvalInput = serde_json::from_value(input).map_err(|e| e.to_string())?;
    let ring = grammar::parse_ring(&input.ring)?;
    let get = |i: usize| -> Result<WittVector, String> {
        grammar::witt_from_strings(
            &ring,
            input
                .args
                .get(i)
                .ok_or_else(|| format!("op {} needs argument {i}", input.op))?,
        )
    };
    let result = match input.op.as_str() {
        "add" => get(0)?.add(&get(1)?),
        "sub" => get(0)?.sub(&get(1)?),
        "mul" => get(0)?.mul(&get(1)?),
        "neg" => get(0)?.neg(),
        "mul-p" => get(0)?.mul_p(),
        "frobenius" => get(0)?.frobenius(),
        "verschiebung" => Ok(get(0)?.verschiebung()),
        "fdiv" => get(0)?.fdiv(),
        "divide-p" => get(0)?.divide_by_p(),
        "invert" => get(0)?.invert(),
        "teichmuller" => {
            let x = grammar::parse_element(
                &ring,
                input
                    .element
                    .as_deref()
                    .ok_or("teichmuller needs element")?,
            )?;
            Ok(WittVector::teichmuller(
                &x,
                input.n.ok_or("teichmuller needs n")?,
            ))
        }
        "from-int" => WittVector::from_int(
            &ring,
            input.k.ok_or("from-int needs k")?,
            input.n.ok_or("from-int needs n")?,
        ),
        other => return Err(format!("unknown witt op {other}")),
    };
    match result {
        Ok(w) => Ok((
            0,
            ctx.report(
                "ok",
                json!({
                    "coords": grammar::witt_to_strings(&w),
                    "literal": grammar::witt_to_literal(&w),
                }),
            ),
        )),
        Err(e) => math_or_err(ctx, e),
    }
}

fn witt_identities(args: &Args, ctx: &mut Ctx) -> Result<(i32, Report), String> {
    let ring_spec = args.require("ring")?.to_string();
    let n = args.flag_u64("n")?.unwrap_or(3) as usize;
    let samples = args.flag_u64("samples")?.unwrap_or(100) as usize;
    ctx.inputs = json!({ "ring": ring_spec, "n": n, "samples": samples });
    let ring = grammar::parse_ring(&ring_spec)?;
    let mut rng = wittcalc_core::rng::SplitMix64::new(ctx.seed);
    let mut checked = 0usize;
    for _ in 0..samples {
        let x = wittcalc_core::rng::random_witt(&mut rng, &ring, n);
        let y = wittcalc_core::rng::random_witt(&mut rng, &ring, n);
        let fv = x.verschiebung().frobenius().map_err(|e| e.to_string())?;
        if fv != x.mul_p().map_err(|e| e.to_string())? {
            return Ok((2, ctx.report("obstruction", json!({"failed": "FV = p"}))));
        }
        let lhs = x
            .mul_trunc(&y.frobenius().map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .verschiebung();
        let rhs = x
            .verschiebung()
            .mul_trunc(&y)
            .map_err(|e| e.to_string())?
            .truncate(n)
            .map_err(|e| e.to_string())?;
        if lhs != rhs {
            return Ok((
                2,
                ctx.report("obstruction", json!({"failed": "V(xF(y)) = V(x)y"})),
            ));
        }
        checked += 2;
    }
    Ok((
        0,
        ctx.report("ok", json!({ "checked": checked, "failures": 0 })),
    ))
}

// ----- display -----

fn display_cmd(args: &Args, ctx: &mut Ctx, sub: &str) -> Result<(i32, Report), String> {
    let input = load_input(args)?;
    ctx.inputs = input.clone();
    let dj: DisplayJson = serde_json::from_value(input).map_err(|e| e.to_string())?;
    let d = match json::display_from_json(&dj) {
        Ok(d) => d,
        Err(msg) => {
            return Ok((2, ctx.report("obstruction", json!({ "reason": msg }))));
        }
    };
    match sub {
        "check" => {
            let det = d.det().map_err(|e| e.to_string())?;
            Ok((
                0,
                ctx.report(
                    "ok",
                    json!({
                        "height": d.height(),
                        "dim": d.dim(),
                        "codim": d.codim(),
                        "precision": d.precision(),
                        "det": grammar::witt_to_strings(&det),
                        "det_is_unit": det.is_unit().map_err(|e| e.to_string())?,
                    }),
                ),
            ))
        }
        "det" => {
            let det = d.det().map_err(|e| e.to_string())?;
            Ok((
                0,
                ctx.report("ok", json!({ "det": grammar::witt_to_strings(&det) })),
            ))
        }
        "nilpotency" => {
            let emax = args.flag_u64("emax")?.unwrap_or(8) as usize;
            let order = d.nilpotency_order(emax).map_err(|e| e.to_string())?;
            Ok((0, ctx.report("ok", json!({ "order": order, "emax": emax }))))
        }
        _ => unreachable!(),
    }
}

// ----- isogeny -----

#[derive(Deserialize)]
struct PairInput {
    src: DisplayJson,
    dst: DisplayJson,
    #[serde(rename = "M")]
    m: MorphismJson,
}

fn load_pair(args: &Args, ctx: &mut Ctx) -> Result<(Frame, Display, Display, Morphism), String> {
    let input = load_input(args)?;
    ctx.inputs = input.clone();
    let pair: PairInput = serde_json::from_value(input).map_err(|e| e.to_string())?;
    let src = json::display_from_json(&pair.src)?;
    let dst = json::display_from_json(&pair.dst)?;
    if src.frame() != dst.frame() {
        return Err("src and dst displays live over different frames".into());
    }
    let frame = src.frame().clone();
    let m = json::morphism_from_json(&frame, &pair.m)?;
    Ok((frame, src, dst, m))
}

fn isogeny_cmd(args: &Args, ctx: &mut Ctx, sub: &str) -> Result<(i32, Report), String> {
    let (frame, src, dst, m) = load_pair(args, ctx)?;
    if !display::is_morphism(&m, &src, &dst).map_err(|e| e.to_string())? {
        return Ok((
            2,
            ctx.report("obstruction", json!({"reason": "structure equation fails"})),
        ));
    }
    match sub {
        "height" => match isogeny::isogeny_height(&frame, &m, &src, &dst) {
            Ok(Some(hd)) => Ok((
                0,
                ctx.report(
                    "ok",
                    json!({ "m": hd.height, "unit": grammar::witt_to_strings(&hd.unit) }),
                ),
            )),
            Ok(None) => Ok((
                2,
                ctx.report(
                    "obstruction",
                    json!({"reason": "determinant valuation at or above the working precision"}),
                ),
            )),
            Err(e) => math_or_err(ctx, e),
        },
        "invert" => {
            let iso = match isogeny::verify_isogeny(&frame, &m, &src, &dst) {
                Ok(i) => i,
                Err(e) => return math_or_err(ctx, e),
            };
            match isogeny::invert_isogeny(&frame, &iso, &src, &dst) {
                Ok(red) => Ok((
                    0,
                    ctx.report(
                        "ok",
                        json!({
                            "frame": grammar::frame_to_spec(&red.frame),
                            "height": iso.height,
                            "morphism": json::morphism_to_json(&red.frame, &red.morphism),
                        }),
                    ),
                )),
                Err(e) => math_or_err(ctx, e),
            }
        }
        "divide-p" => match isogeny::divide_morphism_by_p(&frame, &m, &src, &dst) {
            Ok(red) => Ok((
                0,
                ctx.report(
                    "ok",
                    json!({
                        "frame": grammar::frame_to_spec(&red.frame),
                        "morphism": json::morphism_to_json(&red.frame, &red.morphism),
                    }),
                ),
            )),
            Err(e) => math_or_err(ctx, e),
        },
        _ => unreachable!(),
    }
}

// ----- solvers -----

#[derive(Deserialize)]
struct HomogInput {
    ring: String,
    n: usize,
    e: usize,
    #[serde(rename = "B")]
    b: Vec<Vec<Vec<String>>>,
    #[serde(rename = "C")]
    c: Vec<Vec<Vec<String>>>,
    #[serde(rename = "A", default)]
    a: Option<Vec<Vec<Vec<String>>>>,
    #[serde(rename = "Y", default)]
    y: Option<Vec<Vec<Vec<String>>>>,
}

fn parse_wmat(ring: &Ring, rows: &[Vec<Vec<String>>]) -> Result<wittcalc_core::mat::WMat, String> {
    let rows = rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|wv| grammar::witt_from_strings(ring, wv))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Mat::from_rows(rows).map_err(|e| e.to_string())
}

fn wmat_to_json(m: &wittcalc_core::mat::WMat) -> Value {
    let rows: Vec<Vec<Vec<String>>> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| grammar::witt_to_strings(m.at(i, j)))
                .collect()
        })
        .collect();
    json!(rows)
}

fn solve_cmd(args: &Args, ctx: &mut Ctx, sub: &str) -> Result<(i32, Report), String> {
    let input = load_input(args)?;
    ctx.inputs = input.clone();
    let input: HomogInput = serde_json::from_value(input).map_err(|e| e.to_string())?;
    let ring = grammar::parse_ring(&input.ring)?;
    let b = parse_wmat(&ring, &input.b)?;
    let c = parse_wmat(&ring, &input.c)?;
    match sub {
        "homog" => match isogeny::homogeneous_solutions(&ring, input.n, &b, &c, input.e) {
            Ok(solutions) => {
                let js: Vec<Value> = solutions.iter().map(wmat_to_json).collect();
                Ok((
                    0,
                    ctx.report("ok", json!({ "count": js.len(), "solutions": js })),
                ))
            }
            Err(e) => math_or_err(ctx, e),
        },
        "inhom" => {
            let a = parse_wmat(&ring, input.a.as_ref().ok_or("inhom needs A")?)?;
            let y = parse_wmat(&ring, input.y.as_ref().ok_or("inhom needs Y")?)?;
            let witness = match isogeny::nilpotence_witness(&c, input.e, &ring, input.n) {
                Ok(w) => w,
                Err(e) => return math_or_err(ctx, e),
            };
            match isogeny::solve_inhomogeneous(&ring, &a, &y, &b, &c, input.e, &witness) {
                Ok(x) => Ok((0, ctx.report("ok", json!({ "X": wmat_to_json(&x) })))),
                Err(e) => math_or_err(ctx, e),
            }
        }
        _ => unreachable!(),
    }
}

// ----- deformation -----

#[derive(Deserialize)]
struct DeformInput {
    display: DisplayJson,
    #[serde(default)]
    rank: Option<u32>,
    #[serde(default)]
    graph: Option<Vec<Vec<String>>>,
    /// with these three present, also lift the morphism uniquely to the
    /// relative frame and report the obstruction
    #[serde(default)]
    morphism: Option<MorphismJson>,
    #[serde(default)]
    target_display: Option<DisplayJson>,
    #[serde(default)]
    target_graph: Option<Vec<Vec<String>>>,
}

fn deform_cmd(args: &Args, ctx: &mut Ctx, sub: &str) -> Result<(i32, Report), String> {
    let input = load_input(args)?;
    ctx.inputs = input.clone();
    let input: DeformInput = serde_json::from_value(input).map_err(|e| e.to_string())?;
    let d = json::display_from_json(&input.display)?;
    match sub {
        "tangent" => {
            let ts = deform::tangent_space(&d).map_err(|e| e.to_string())?;
            let lifts: Vec<Value> = ts
                .lifts
                .iter()
                .take(64)
                .map(|(y, disp)| {
                    json!({
                        "graph": y.graph.entries().map(grammar::element_to_string).collect::<Vec<_>>(),
                        "display": json::display_to_json(disp),
                    })
                })
                .collect();
            Ok((
                0,
                ctx.report(
                    "ok",
                    json!({ "dimension": ts.dimension, "count": ts.lifts.len(), "lifts": lifts }),
                ),
            ))
        }
        "lift" => {
            let rank = input.rank.unwrap_or(1);
            let th = d
                .frame()
                .ring()
                .square_zero_extension(rank)
                .map_err(|e| e.to_string())?;
            let (dd, cc) = d.shape();
            let y = match &input.graph {
                None => deform::FiltrationLift::zero(&th, dd, cc),
                Some(rows) => {
                    if rows.len() != dd || rows.iter().any(|r| r.len() != cc) {
                        return Err("graph must be a dim x codim matrix".into());
                    }
                    let entries = rows
                        .iter()
                        .map(|r| {
                            r.iter()
                                .map(|s| grammar::parse_element(&th.ambient, s))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    let graph = Mat::from_rows(entries).map_err(|e| e.to_string())?;
                    deform::FiltrationLift::new(&th, graph).map_err(|e| e.to_string())?
                }
            };
            let lifted = match deform::lift_display(&d, &y, &th) {
                Ok(l) => l,
                Err(e) => return math_or_err(ctx, e),
            };
            let mut result = json!({ "display": json::display_to_json(&lifted) });
            if let (Some(mj), Some(tj)) = (&input.morphism, &input.target_display) {
                let margin = args.flag_u64("margin")?.unwrap_or(1) as usize;
                let f_a = json::morphism_from_json(d.frame(), mj)?;
                let t_a = json::display_from_json(tj)?;
                let (td, tc) = t_a.shape();
                let ty = match &input.target_graph {
                    None => deform::FiltrationLift::zero(&th, td, tc),
                    Some(rows) => {
                        let entries = rows
                            .iter()
                            .map(|r| {
                                r.iter()
                                    .map(|s| grammar::parse_element(&th.ambient, s))
                                    .collect::<Result<Vec<_>, _>>()
                            })
                            .collect::<Result<Vec<_>, _>>()?;
                        let graph = Mat::from_rows(entries).map_err(|e| e.to_string())?;
                        deform::FiltrationLift::new(&th, graph).map_err(|e| e.to_string())?
                    }
                };
                let t_b = match deform::lift_display(&t_a, &ty, &th) {
                    Ok(l) => l,
                    Err(e) => return math_or_err(ctx, e),
                };
                match deform::lift_morphism_unique(&f_a, &lifted, &t_b, &th, margin) {
                    Ok(lift) => {
                        result["morphism_lift"] = json!({
                            "frame": grammar::frame_to_spec(&lift.frame),
                            "margin": lift.margin,
                            "morphism": json::morphism_to_json(&lift.frame, &lift.morphism),
                            "obstruction": lift
                                .obstruction
                                .entries()
                                .map(grammar::element_to_string)
                                .collect::<Vec<_>>(),
                            "obstruction_vanishes": lift
                                .obstruction
                                .entries()
                                .all(|x| x.is_zero()),
                        });
                    }
                    Err(e) => return math_or_err(ctx, e),
                }
            }
            Ok((0, ctx.report("ok", result)))
        }
        _ => unreachable!(),
    }
}

// ----- lifting / extension -----

#[derive(Deserialize)]
struct ExtendInput {
    display: DisplayJson,
    #[serde(rename = "M")]
    m: MorphismJson,
    reference: DisplayJson,
}

#[derive(Deserialize)]
struct IsoInput {
    g_src: DisplayJson,
    g: MorphismJson,
    gprime_src: DisplayJson,
    gprime: MorphismJson,
    target: DisplayJson,
}

fn lift_cmd(args: &Args, ctx: &mut Ctx, sub: &str) -> Result<(i32, Report), String> {
    match sub {
        "extend" => {
            let input = load_input(args)?;
            ctx.inputs = input.clone();
            let input: ExtendInput = serde_json::from_value(input).map_err(|e| e.to_string())?;
            let d = json::display_from_json(&input.display)?;
            let m = json::morphism_from_json(d.frame(), &input.m)?;
            let reference = json::display_from_json(&input.reference)?;
            let precision = args
                .flag_u64("precision")?
                .ok_or("lift extend needs --precision")? as usize;
            match deform::extend_isogeny(&d, &m, &reference, precision) {
                Ok(ext) => Ok((
                    0,
                    ctx.report(
                        "ok",
                        json!({
                            "height": ext.height,
                            "display": json::display_to_json(&ext.display),
                            "morphism": json::morphism_to_json(&ext.frame, &ext.morphism),
                        }),
                    ),
                )),
                Err(e) => math_or_err(ctx, e),
            }
        }
        "iso" => {
            let input = load_input(args)?;
            ctx.inputs = input.clone();
            let input: IsoInput = serde_json::from_value(input).map_err(|e| e.to_string())?;
            let p_src = json::display_from_json(&input.g_src)?;
            let q_src = json::display_from_json(&input.gprime_src)?;
            let target = json::display_from_json(&input.target)?;
            let frame = target.frame().clone();
            let g_m = json::morphism_from_json(&frame, &input.g)?;
            let gp_m = json::morphism_from_json(&frame, &input.gprime)?;
            let g = match isogeny::verify_isogeny(&frame, &g_m, &p_src, &target) {
                Ok(i) => i,
                Err(e) => return math_or_err(ctx, e),
            };
            let gp = match isogeny::verify_isogeny(&frame, &gp_m, &q_src, &target) {
                Ok(i) => i,
                Err(e) => return math_or_err(ctx, e),
            };
            match deform::solve_lifting_isomorphism(&frame, &g, &p_src, &gp, &q_src, &target) {
                Ok(red) => Ok((
                    0,
                    ctx.report(
                        "ok",
                        json!({
                            "frame": grammar::frame_to_spec(&red.frame),
                            "morphism": json::morphism_to_json(&red.frame, &red.morphism),
                        }),
                    ),
                )),
                Err(e) => math_or_err(ctx, e),
            }
        }
        _ => unreachable!(),
    }
}

// ----- moduli -----

fn moduli_cmd(args: &Args, ctx: &mut Ctx) -> Result<(i32, Report), String> {
    let base_path = args.require("base")?.to_string();
    let text = std::fs::read_to_string(&base_path).map_err(|e| format!("{base_path}: {e}"))?;
    let dj: DisplayJson = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let base = json::display_from_json(&dj)?;
    let r = args.flag_u64("r")?.unwrap_or(0) as usize;
    let s = args.flag_u64("s")?.unwrap_or(0) as usize;
    let threads = args.flag_u64("threads")?.unwrap_or(1).max(1) as usize;
    ctx.inputs = json!({ "base": base_path, "r": r, "s": s, "threads": threads });

    let points = enumerate_threaded(&base, r, s, threads)?;
    let pts_json: Vec<Value> = points
        .iter()
        .map(|pt| {
            json!({
                "r": pt.r,
                "s": pt.s,
                "display": json::display_to_json(&pt.display),
                "denominator_exponent": pt.iso.denom_exp,
            })
        })
        .collect();

    if let Some(csv_path) = args.flag("csv") {
        let mut csv = String::from("s,count\n");
        for si in 0..=s {
            let c = if si == s {
                points.len()
            } else {
                enumerate_threaded(&base, r, si, threads)?.len()
            };
            csv.push_str(&format!("{si},{c}\n"));
        }
        std::fs::write(csv_path, csv).map_err(|e| e.to_string())?;
    }

    Ok((
        0,
        ctx.report("ok", json!({ "count": points.len(), "points": pts_json })),
    ))
}

fn enumerate_threaded(
    base: &Display,
    r: usize,
    s: usize,
    threads: usize,
) -> Result<Vec<moduli::ModuliPoint>, String> {
    if threads <= 1 {
        return moduli::enumerate_points(base, r, s).map_err(|e| e.to_string());
    }
    let mut parts: Vec<Vec<moduli::ModuliPoint>> = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..threads)
            .map(|part| {
                scope.spawn(move || moduli::enumerate_points_part(base, r, s, part, threads))
            })
            .collect();
        for h in handles {
            parts.push(
                h.join()
                    .expect("enumeration thread panicked")
                    .map_err(|e| e.to_string())?,
            );
        }
        Ok::<(), String>(())
    })?;
    let mut merged: Vec<moduli::ModuliPoint> = parts.into_iter().flatten().collect();
    // canonical order, independent of the partitioning
    merged.sort_by_key(|pt| format!("{:?}", pt.lattice));
    let deep = moduli::enumeration_base(base, r, s).map_err(|e| e.to_string())?;
    moduli::dedup_points(&deep, merged).map_err(|e| e.to_string())
}

// ----- selftest / fixtures -----

fn selftest_cmd(ctx: &mut Ctx, name: &str, seed: u64) -> Result<(i32, Report), String> {
    ctx.inputs = json!({ "suite": name });
    if name == "all" {
        let outcomes = selftest::run_all(seed).map_err(|e| e.to_string())?;
        let all_pass = outcomes.iter().all(|o| o.passed);
        let results: Vec<Value> = outcomes
            .iter()
            .map(|o| json!({ "name": o.name, "passed": o.passed, "details": o.details }))
            .collect();
        return Ok((
            if all_pass { 0 } else { 1 },
            ctx.report(if all_pass { "ok" } else { "error" }, json!(results)),
        ));
    }
    let outcome = selftest::run_by_name(name, seed).map_err(|e| e.to_string())?;
    let code = if outcome.passed { 0 } else { 1 };
    Ok((
        code,
        ctx.report(
            if outcome.passed { "ok" } else { "error" },
            json!({ "name": outcome.name, "passed": outcome.passed, "details": outcome.details }),
        ),
    ))
}

fn fixtures_cmd(args: &Args, ctx: &mut Ctx, sub: &str) -> Result<(i32, Report), String> {
    let dir = PathBuf::from(args.require("dir")?);
    ctx.inputs = json!({ "dir": dir.display().to_string() });
    match sub {
        "generate" => {
            let manifest = crate::fixtures::generate(&dir, ctx.seed)?;
            Ok((
                0,
                ctx.report("ok", serde_json::to_value(&manifest).unwrap()),
            ))
        }
        "verify" => match crate::fixtures::verify(&dir) {
            Ok(manifest) => Ok((
                0,
                ctx.report("ok", serde_json::to_value(&manifest).unwrap()),
            )),
            Err(msg) => Ok((1, ctx.report("error", json!({ "reason": msg })))),
        },
        _ => unreachable!(),
    }
}
