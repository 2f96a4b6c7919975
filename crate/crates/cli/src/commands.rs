use crate::error::CliError;
use crate::output::{num, svg, Artifacts};
use crate::{Command, Settings};
use renorm_core::cohomology::{invariant_classes, map_action, verify_reference_matrices, BlowupSurface};
use renorm_core::conjugacy::{
    backward_equidistribution, fiber_conjugation_check, skew_cantor_experiment, twist_experiment, verify_all,
    BackwardModel, Graph,
};
use renorm_core::groups::Builtin;
use renorm_core::ratmaps::{contracted_catalog, potential_grid, GrowthClass, MapName, RationalMapP2, RecursionPotential};
use renorm_core::spectra::{convergence_report, dos, julia_backward, JuliaMode, Quadratic};
use renorm_core::PencilScheme;
use serde_json::{json, Value};

pub struct Outcome {
    pub command: &'static str,
    /// `None` when the command verifies nothing.
    pub passed: Option<bool>,
    pub failure: Option<String>,
    pub summary: Value,
}

impl Outcome {
    fn data(command: &'static str, summary: Value) -> Self {
        Outcome { command, passed: None, failure: None, summary }
    }
    fn verdict(command: &'static str, ok: bool, why: impl Into<String>, summary: Value) -> Self {
        Outcome { command, passed: Some(ok), failure: (!ok).then(|| why.into()), summary }
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable")
}

fn group(s: &Settings) -> Result<Builtin, CliError> {
    let g: Builtin = s.group.as_deref().unwrap_or("grigorchuk").parse()?;
    if g == Builtin::Custom {
        return Err(CliError::Config("custom groups have no builtin pencil; pick grigorchuk, lamplighter or hanoi".into()));
    }
    Ok(g)
}

pub fn dispatch(cmd: &Command, s: &Settings, art: &mut Artifacts) -> Result<Outcome, CliError> {
    match cmd {
        Command::Spectrum => spectrum(s, art),
        Command::DosCompare { min_level } => dos_compare(s, *min_level, art),
        Command::SchurVerify { contracted } => schur_verify(s, *contracted, art),
        Command::ConjugacyVerify => conjugacy_verify(s, art),
        Command::Dyndeg => dyndeg(s, art),
        Command::Cohomology => cohomology(s, art),
        Command::PotentialGrid { window } => potential(s, window.clone(), art),
        Command::Julia { mode } => julia(s, mode.clone(), art),
        Command::Experiment { kind, eta } => experiment(s, kind, *eta, art),
    }
}

fn spectrum(s: &Settings, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let g = group(s)?;
    let n = s.level.unwrap_or(6);
    let r = dos(g, n)?;
    let stem = format!("spectrum_{}_{n}", g.name());
    let rows: Vec<Vec<String>> = r.measure.points.iter().enumerate().map(|(i, &x)| vec![i.to_string(), num(x)]).collect();
    art.csv(&stem, &["index", "eigenvalue"], &rows)?;
    let scale = r.dimension() as f64;
    let atoms: Vec<Value> = r
        .atoms()
        .iter()
        .filter(|(_, m)| (m * scale).round() >= 2.0)
        .map(|&(x, m)| json!({ "x": x, "mass": m, "multiplicity": (m * scale).round() as u64 }))
        .collect();
    let summary = json!({
        "group": g.name(),
        "level": n,
        "seed": s.seed,
        "slice": to_value(&r.slice),
        "eigenvalues": r.count(),
        "residual": r.residual,
        "atom_count": atoms.len(),
        "atom_mass": atoms.iter().map(|a| a["mass"].as_f64().unwrap_or(0.0)).sum::<f64>(),
    });
    art.json(&format!("{stem}_atoms"), &json!({ "run": summary, "atoms": atoms }))?;
    art.svg(&stem, || svg::histogram(&format!("{} level {n}", g.name()), "eigenvalue", &r.measure.points, 80))?;
    Ok(Outcome::data("spectrum", summary))
}

fn dos_compare(s: &Settings, min_level: Option<usize>, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let g = group(s)?;
    let hi = s.level.unwrap_or(8);
    let lo = s.file.pick(min_level, "min-level")?.unwrap_or(hi.saturating_sub(4).max(1));
    let rep = convergence_report(g, lo..=hi)?;
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<Vec<String>> = rep
        .rows
        .iter()
        .map(|r| vec![r.level.to_string(), num(r.distance), opt(r.successive), opt(r.ratio), opt(r.tv_successive)])
        .collect();
    let stem = format!("dos_compare_{}_{lo}_{hi}", g.name());
    art.csv(&stem, &["level", "distance", "successive", "ratio", "tv_successive"], &rows)?;
    art.json(&stem, &to_value(&rep))?;
    let pts: Vec<(f64, f64)> = rep.rows.iter().map(|r| (r.level as f64, r.distance.max(1e-300).log10())).collect();
    art.svg(&stem, || svg::plot(&format!("{} distance to limit", g.name()), "level", "log10 distance", &pts, svg::Style::Line))?;
    Ok(Outcome::data(
        "dos-compare",
        json!({ "group": g.name(), "levels": [lo, hi], "fitted_log_rate": rep.fitted_log_rate, "predicted_log_rate": rep.predicted_log_rate }),
    ))
}

fn schur_verify(s: &Settings, contracted: bool, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let g = group(s)?;
    let n = s.level.unwrap_or(3);
    let k = s.samples.unwrap_or(20);
    let seed = s.seed.unwrap_or(0);
    let rep = PencilScheme::builtin(g)?.verify_recursion(n, k, seed)?;
    let stem = format!("schur_verify_{}_{n}", g.name());
    let mut rows: Vec<Vec<String>> =
        vec![vec!["recursion".into(), g.name().into(), n.to_string(), rep.samples.to_string(), rep.failures.len().to_string()]];
    let mut ok = rep.failures.is_empty();
    let mut report = json!({ "recursion": to_value(&rep), "seed": seed });
    if s.file.flag(contracted, "contracted")? {
        let cat = contracted_catalog()?;
        let bad = cat.iter().filter(|c| !c.pass).count();
        ok &= bad == 0;
        rows.push(vec!["contracted".into(), "all".into(), String::new(), cat.len().to_string(), bad.to_string()]);
        report["contracted"] = to_value(&cat);
    }
    art.csv(&stem, &["check", "group", "level", "samples", "failures"], &rows)?;
    art.json(&stem, &report)?;
    let summary = json!({ "group": g.name(), "level": n, "samples": rep.samples, "failures": rep.failures.len() });
    Ok(Outcome::verdict("schur-verify", ok, "recursion or catalog mismatch", summary))
}

fn conjugacy_verify(s: &Settings, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let samples = s.samples.unwrap_or(100);
    let seed = s.seed.unwrap_or(2024);
    let exact = verify_all()?;
    let fiber = fiber_conjugation_check(samples, 1e-9, seed)?;
    let mut rows: Vec<Vec<String>> = exact.iter().map(|c| vec![c.name.clone(), "exact".into(), c.holds.to_string(), String::new()]).collect();
    rows.push(vec!["grigorchuk fiber sampled".into(), format!("{samples} samples"), fiber.passed().to_string(), num(fiber.max_error())]);
    art.csv("conjugacy_verify", &["identity", "mode", "holds", "max_error"], &rows)?;
    art.json("conjugacy_verify", &json!({ "exact": to_value(&exact), "sampled": to_value(&fiber), "seed": seed }))?;
    let ok = exact.iter().all(|c| c.holds) && fiber.passed();
    let failed: Vec<&str> = exact.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect();
    let summary = json!({ "exact": exact.len(), "exact_failed": failed, "sampled_max_error": fiber.max_error() });
    Ok(Outcome::verdict("conjugacy-verify", ok, "conjugacy identity failed", summary))
}

fn dyndeg(s: &Settings, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let name = s.map.as_deref().unwrap_or("rg");
    let map: MapName = name.parse()?;
    let n = s.iters.unwrap_or(7);
    let trials = s.samples.unwrap_or(3);
    let seed = s.seed.unwrap_or(5);
    let dd = RationalMapP2::builtin(map).dynamical_degree(n, trials, seed)?;
    let stem = format!("dyndeg_{}", to_value(&map).as_str().unwrap_or(name));
    let rows: Vec<Vec<String>> = dd.degrees.iter().enumerate().map(|(i, d)| vec![(i + 1).to_string(), d.to_string()]).collect();
    art.csv(&stem, &["iterate", "degree"], &rows)?;
    art.json(&stem, &to_value(&dd))?;
    let pts: Vec<(f64, f64)> = dd.degrees.iter().enumerate().map(|(i, &d)| ((i + 1) as f64, (d as f64).log2())).collect();
    art.svg(&stem, || svg::plot("degree growth", "iterate", "log2 degree", &pts, svg::Style::Line))?;
    let summary = json!({ "map": to_value(&map), "degrees": dd.degrees, "estimate": dd.estimate, "class": to_value(&dd.class) });
    if !s.check {
        return Ok(Outcome::data("dyndeg", summary));
    }
    let ok = match map {
        MapName::RG | MapName::RH | MapName::GG => matches!(dd.class, GrowthClass::Exponential { base } if (1.8..=2.2).contains(&base)),
        MapName::RL => dd.class == GrowthClass::Linear,
        _ => return Err(CliError::Config(format!("no expected growth recorded for map `{name}`"))),
    };
    Ok(Outcome::verdict("dyndeg", ok, "unexpected degree growth", summary))
}

fn surface_name(s: &Settings) -> String {
    match s.surface.as_deref().unwrap_or("grigorchuk4") {
        "grigorchuk" => "grigorchuk4".into(),
        "lamplighter" => "lamplighter2".into(),
        "hanoi" => "hanoi4".into(),
        o => o.to_string(),
    }
}

fn cohomology(s: &Settings, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let name = surface_name(s);
    let rep = verify_reference_matrices(&name)?;
    let x = BlowupSurface::preset(&name)?;
    let (push, d) = match name.as_str() {
        "grigorchuk4" => (renorm_core::cohomology::printed::grig_push(), 2),
        "hanoi4" => (renorm_core::cohomology::printed::hanoi_push(), 2),
        _ => (renorm_core::cohomology::lamplighter_push_from_relations(), 1),
    };
    let action = map_action(&x, &push, d as u32)?;
    let inv = invariant_classes(&x, &action, d, &x.default_effective())?;
    let mut rows: Vec<Vec<String>> = rep.checks.iter().map(|c| vec![c.name.clone(), c.pass.to_string()]).collect();
    rows.push(vec!["spectral radius".into(), num(rep.spectral_radius)]);
    rows.push(vec!["jordan block".into(), rep.jordan_nontrivial.to_string()]);
    let stem = format!("cohomology_{name}");
    art.csv(&stem, &["check", "value"], &rows)?;
    art.json(&stem, &json!({ "report": to_value(&rep), "action": to_value(&action), "invariant": to_value(&inv) }))?;
    let summary = json!({
        "surface": name,
        "spectral_radius": rep.spectral_radius,
        "jordan_nontrivial": rep.jordan_nontrivial,
        "invariant_classes": inv.candidates().iter().map(|c| c.class.coords.clone()).collect::<Vec<_>>(),
        "printed_inconsistencies": rep.printed_inconsistencies,
    });
    if !s.check {
        return Ok(Outcome::data("cohomology", summary));
    }
    let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    Ok(Outcome::verdict("cohomology", failed.is_empty(), failed.join("; "), summary))
}

fn parse_window(w: &str) -> Result<[f64; 4], CliError> {
    let v: Vec<f64> = w
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Config(format!("window: {e}")))?;
    match v[..] {
        [a, b, c, d] if a < b && c < d => Ok([a, b, c, d]),
        _ => Err(CliError::Config("window must be x0,x1,y0,y1 with x0 < x1 and y0 < y1".into())),
    }
}

fn potential(s: &Settings, window: Option<String>, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let g = group(s)?;
    let n = s.level.unwrap_or(10);
    let res = s.samples.unwrap_or(64);
    let w = match s.file.pick(window, "window")? {
        Some(w) => parse_window(&w)?,
        None => [-4.0, 4.0, -4.0, 4.0],
    };
    let pot = RecursionPotential { scheme: PencilScheme::builtin(g)? };
    let field = potential_grid(&pot, w, res, n)?;
    let mut rows = Vec::with_capacity(res * res);
    for j in 0..res {
        for i in 0..res {
            let (x, y) = field.coords(i, j);
            rows.push(vec![i.to_string(), j.to_string(), num(x), num(y), num(field.get(i, j))]);
        }
    }
    let stem = format!("potential_{}_{n}", g.name());
    art.csv(&stem, &["i", "j", "lambda", "mu", "value"], &rows)?;
    let summary = json!({ "group": g.name(), "level": n, "window": w, "resolution": res, "flagged": field.flagged() });
    art.json(&stem, &summary)?;
    art.svg(&stem, || svg::heatmap(&format!("potential {} n={n}", g.name()), w, res, &field.values))?;
    Ok(Outcome::data("potential-grid", summary))
}

fn quadratic(name: &str) -> Result<Quadratic, CliError> {
    match name {
        "hanoi" | "rh" => Ok(Quadratic::HANOI),
        "square" => Ok(Quadratic::SQUARE),
        "cheb" => Ok(Quadratic::CHEB),
        o => Err(CliError::Config(format!("no quadratic named `{o}` (hanoi, square, cheb)"))),
    }
}

fn julia(s: &Settings, mode: Option<String>, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let qname = s.map.as_deref().unwrap_or("hanoi");
    let q = quadratic(qname)?;
    let depth = s.iters.unwrap_or(10);
    let seed = s.seed.unwrap_or(0);
    let mode = match s.file.pick(mode, "mode")?.as_deref().unwrap_or("full") {
        "full" => JuliaMode::FullTree,
        "random" => JuliaMode::RandomWalk,
        o => return Err(CliError::Config(format!("unknown julia mode `{o}` (full, random)"))),
    };
    let pts = julia_backward(q, depth, mode, false, seed)?;
    let rows: Vec<Vec<String>> = pts.points.iter().map(|z| vec![num(z.re), num(z.im)]).collect();
    let stem = format!("julia_{qname}_{depth}");
    art.csv(&stem, &["re", "im"], &rows)?;
    let summary = json!({ "map": qname, "depth": depth, "mode": to_value(&mode), "seed": seed, "points": pts.points.len(), "real": pts.measure.is_some() });
    art.json(&stem, &summary)?;
    let xy: Vec<(f64, f64)> = pts.points.iter().map(|z| (z.re, z.im)).collect();
    art.svg(&stem, || svg::plot(&format!("backward orbit of {qname}"), "re", "im", &xy, svg::Style::Dots))?;
    Ok(Outcome::data("julia", summary))
}

fn experiment(s: &Settings, kind: &str, eta: Option<f64>, art: &mut Artifacts) -> Result<Outcome, CliError> {
    let eta = s.file.pick(eta, "eta")?;
    match kind {
        "twist" => {
            let n = s.iters.unwrap_or(10);
            let r = twist_experiment(n, &Graph::line(1.0 / 3.0, 5.0), &Graph::line(1.0, 0.5))?;
            let rows: Vec<Vec<String>> = r.roots.iter().map(|&a| vec![num(a)]).collect();
            let stem = format!("experiment_twist_{n}");
            art.csv(&stem, &["base_point"], &rows)?;
            art.json(&stem, &to_value(&r))?;
            art.svg(&stem, || svg::histogram("twist intersections", "base", &r.roots, 40))?;
            Ok(Outcome::data(
                "experiment",
                json!({ "kind": "twist", "n": n, "count": r.count, "winding": r.winding, "w1_rotation_law": r.w1_rotation_law }),
            ))
        }
        "skew" => {
            let n = s.iters.unwrap_or(10);
            let e = eta.unwrap_or(3.0);
            let r = skew_cantor_experiment(e, n, &Graph::line(1.0, 0.0))?;
            let rows: Vec<Vec<String>> = r.slice.iter().map(|&(a, b)| vec![num(a), num(b)]).collect();
            let stem = format!("experiment_skew_{n}");
            art.csv(&stem, &["base", "fiber"], &rows)?;
            art.json(&stem, &to_value(&r))?;
            art.svg(&stem, || svg::histogram("skew preimage fibers", "base", &r.fibers, 80))?;
            Ok(Outcome::data("experiment", json!({ "kind": "skew", "n": n, "eta0": e, "w1_to_mp": r.w1_to_mp })))
        }
        "backward" => {
            let model: BackwardModel = s.map.as_deref().unwrap_or("square").parse()?;
            let n = s.iters.unwrap_or(12);
            // Chebyshev and Cantor seeds must sit where every preimage is real.
            let e = eta.unwrap_or(match model {
                BackwardModel::Square => 1.7,
                BackwardModel::Cheb => 0.3,
                BackwardModel::Cantor => 0.5,
            });
            let r = backward_equidistribution(model, e, n)?;
            let rows: Vec<Vec<String>> =
                r.levels.iter().zip(r.w1.iter().zip(&r.kolmogorov)).map(|(l, (w, k))| vec![l.to_string(), num(*w), num(*k)]).collect();
            let stem = format!("experiment_backward_{}", to_value(&model).as_str().unwrap_or("model"));
            art.csv(&stem, &["level", "w1", "kolmogorov"], &rows)?;
            art.json(&stem, &to_value(&r))?;
            let pts: Vec<(f64, f64)> = r.levels.iter().zip(&r.w1).map(|(&l, &w)| (l as f64, w.max(1e-300).log10())).collect();
            art.svg(&stem, || svg::plot("backward equidistribution", "level", "log10 W1", &pts, svg::Style::Line))?;
            Ok(Outcome::data("experiment", json!({ "kind": "backward", "model": to_value(&model), "n": n, "seed_point": e, "w1": r.w1.last() })))
        }
        o => Err(CliError::Config(format!("unknown experiment `{o}` (twist, skew, backward)"))),
    }
}
