use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use sphere_coulomb::conformal::{droplet, Droplet};
use sphere_coulomb::energy::energy_curve;
use sphere_coulomb::geometry::critical_w;
use sphere_coulomb::jue::{
    airy_fredholm_gap, constrained_density, energy_identity_check, gammas_from_charges,
    painleve_gap, rate_difference, soft_edge_scale, wachter, HastingsMcLeod,
};
use sphere_coulomb::oracle::{
    duality_check_small_n, gap_rewrite_check, rewrite_constant_ln, sample_with, DualityReport,
};
use sphere_coulomb::{ChargeConfig, Error};

mod output;

use output::{destination, write_atomic, Cell, Format, Provenance, Table};

#[derive(Parser, Debug)]
#[command(name = "sphere-coulomb", version, about = "Coulomb gas on the sphere with two point charges")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Droplet boundary curves in the stereographic plane.
    Droplet(DropletArgs),
    /// Normalised free energy K_N across a range of w.
    EnergyCurve(EnergyArgs),
    /// Wachter and hard-wall constrained Jacobi densities.
    JueDensity(JueDensityArgs),
    /// Large-deviation rate S(L(zeta), zeta) - S(cJ, dJ) against the wall position.
    RateCurve(RateArgs),
    /// Sphere energy difference against the Jacobi rate function.
    Identity(IdentityArgs),
    /// Small-size duality check between the sphere and Jacobi averages.
    Duality(DualityArgs),
    /// Metropolis snapshots of the finite-N gas.
    Sample(SampleArgs),
    /// Soft-edge scaling constants and the Painleve II gap probability.
    SoftEdge(SoftEdgeArgs),
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct OutputArgs {
    /// Output file; defaults to $SPHERE_COULOMB_OUT/<command>.<ext> or stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    #[serde(skip)]
    format: Format,
}

#[derive(Args, Debug, Serialize)]
struct Charges {
    #[arg(long = "Q0")]
    #[serde(rename = "Q0")]
    q0: f64,
    #[arg(long = "Q1")]
    #[serde(rename = "Q1")]
    q1: f64,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct DropletArgs {
    #[command(flatten)]
    #[serde(flatten)]
    charges: Charges,
    #[arg(long)]
    w: f64,
    /// Points per boundary curve.
    #[arg(long, default_value_t = 512)]
    resolution: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct EnergyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    charges: Charges,
    /// start:stop[:count]
    #[arg(long = "w-range", default_value = "0.05:5:200")]
    w_range: String,
    /// Log-spaced grid.
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
struct JacobiParams {
    /// Charges (Q0, Q1) determine gamma1 = Q0/Q1 - 1, gamma2 = 1/Q1.
    #[arg(long = "Q0", requires = "q1", conflicts_with_all = ["gamma1", "gamma2"])]
    #[serde(rename = "Q0")]
    q0: Option<f64>,
    #[arg(long = "Q1", requires = "q0")]
    #[serde(rename = "Q1")]
    q1: Option<f64>,
    #[arg(long, requires = "gamma2")]
    gamma1: Option<f64>,
    #[arg(long, requires = "gamma1")]
    gamma2: Option<f64>,
}

impl JacobiParams {
    fn gammas(&self) -> (f64, f64) {
        match (self.q0, self.q1, self.gamma1, self.gamma2) {
            (Some(q0), Some(q1), _, _) => {
                let (q0, q1) = if q0 >= q1 { (q0, q1) } else { (q1, q0) };
                gammas_from_charges(q0, q1)
            }
            (_, _, Some(g1), Some(g2)) => (g1, g2),
            _ => (4.0, 2.0),
        }
    }
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct JueDensityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    jacobi: JacobiParams,
    /// Hard wall position.
    #[arg(long, conflicts_with = "w")]
    zeta: Option<f64>,
    /// Wall at 1/(1 + w^2).
    #[arg(long)]
    w: Option<f64>,
    #[arg(long, default_value_t = 400)]
    resolution: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct RateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    jacobi: JacobiParams,
    /// Wall positions start:stop[:count]; defaults to (dJ/10, dJ).
    #[arg(long = "zeta-range")]
    zeta_range: Option<String>,
    #[arg(long, default_value_t = 200)]
    resolution: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct IdentityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    charges: Charges,
    /// start:stop[:count]; defaults to 50 log-spaced points in (w_cri, 10).
    #[arg(long = "w-range")]
    w_range: Option<String>,
    #[arg(long)]
    log: bool,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct DualityArgs {
    #[arg(long = "N")]
    #[serde(rename = "N")]
    n: usize,
    #[arg(long)]
    r: usize,
    #[arg(long = "K")]
    #[serde(rename = "K")]
    k: usize,
    #[arg(long)]
    w: f64,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct SampleArgs {
    #[arg(long = "Q0")]
    #[serde(rename = "Q0")]
    q0: f64,
    #[arg(long = "Q1")]
    #[serde(rename = "Q1")]
    q1: f64,
    #[arg(long)]
    w: f64,
    #[arg(long = "N", default_value_t = 100)]
    #[serde(rename = "N")]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    /// Sweeps between snapshots; defaults to N.
    #[arg(long)]
    thin: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

#[derive(Args, Debug, Serialize)]
#[command(allow_negative_numbers = true)]
struct SoftEdgeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    charges: Charges,
    /// start:stop[:count]
    #[arg(long = "t-range", default_value = "-6:4:101", allow_hyphen_values = true)]
    t_range: String,
    /// Nystrom nodes for the Fredholm determinant.
    #[arg(long, default_value_t = 60)]
    resolution: usize,
    #[command(flatten)]
    #[serde(skip)]
    out: OutputArgs,
}

enum Failure {
    Param(String),
    Numeric(String),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Phase { .. } | Error::Unsupported(_) => Failure::Param(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

type Outcome<T> = Result<T, Failure>;

fn param<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Param(msg.into()))
}

/// `start:stop[:count]`, linear or log spaced.
fn parse_range(spec: &str, default_count: usize, log: bool) -> Outcome<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if !(2..=3).contains(&parts.len()) {
        return param(format!("range '{spec}' is not start:stop[:count]"));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Failure::Param(format!("bad number '{s}' in range '{spec}'")));
    let (a, b) = (num(parts[0])?, num(parts[1])?);
    let n = match parts.get(2) {
        Some(c) => c.trim().parse::<usize>().map_err(|_| Failure::Param(format!("bad count in range '{spec}'")))?,
        None => default_count,
    };
    if n < 2 || !(b > a) {
        return param(format!("range '{spec}' needs stop > start and count >= 2"));
    }
    if log && !(a > 0.0) {
        return param("log-spaced range needs a positive start");
    }
    Ok((0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            if log {
                a * (b / a).powf(t)
            } else {
                a + (b - a) * t
            }
        })
        .collect())
}

fn params_of(args: &impl Serialize) -> Map<String, Value> {
    match serde_json::to_value(args) {
        Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

fn cmd_droplet(a: &DropletArgs) -> Outcome<Table> {
    if a.resolution < 16 {
        return param("--resolution must be at least 16");
    }
    let cfg = ChargeConfig::new(a.charges.q0, a.charges.q1, a.w)?;
    let d = droplet(&cfg, a.resolution)?;
    let mut t = Table::new(vec!["curve", "index", "x", "y"]);
    t.extra.insert("phase".into(), json!(cfg.phase().tag.name()));
    t.extra.insert("w_cri".into(), json!(cfg.w_cri()));
    if let Droplet::PreCritical { map, .. } = &d {
        t.extra.insert("map".into(), json!(map));
    }
    let names = match &d {
        Droplet::PreCritical { .. } => ["boundary", ""],
        _ => ["outer", "inner"],
    };
    for (c, curve) in d.curves().iter().enumerate() {
        for (i, z) in curve.points.iter().enumerate() {
            t.push(vec![names[c].into(), i.into(), z.re.into(), z.im.into()]);
        }
        // close the polygon for plotting
        if let Some(z) = curve.points.first() {
            t.push(vec![names[c].into(), curve.points.len().into(), z.re.into(), z.im.into()]);
        }
    }
    t.plot.x = 2;
    t.plot.ys = vec![3];
    t.plot.group = Some(0);
    t.plot.equal_axes = true;
    Ok(t)
}

fn cmd_energy(a: &EnergyArgs) -> Outcome<Table> {
    let ws = parse_range(&a.w_range, 200, a.log)?;
    if ws[0] <= 0.0 {
        return param("w must be positive");
    }
    let pts = energy_curve(a.charges.q0, a.charges.q1, &ws)?;
    let w_cri = critical_w(a.charges.q0, a.charges.q1)?;
    let mut t = Table::new(vec!["w", "phase", "K_N"]);
    t.extra.insert("w_cri".into(), json!(w_cri));
    for p in pts {
        // K_N = -k / 4 with k the stored (4 / (beta N^2)) log-normalisation
        t.push(vec![p.w.into(), p.phase.into(), (-p.k / 4.0).into()]);
    }
    t.plot.x = 0;
    t.plot.ys = vec![2];
    t.plot.vlines = vec![w_cri];
    Ok(t)
}

fn cmd_jue_density(a: &JueDensityArgs) -> Outcome<Table> {
    let (g1, g2) = a.jacobi.gammas();
    let spec = wachter(g1, g2)?;
    let zeta = match (a.zeta, a.w) {
        (Some(z), _) => z,
        (None, Some(w)) => 1.0 / (1.0 + w * w),
        (None, None) => 0.75,
    };
    if !(zeta > 0.0 && zeta < 1.0) {
        return param(format!("wall position {zeta} must lie in (0, 1)"));
    }
    if a.resolution < 2 {
        return param("--resolution must be at least 2");
    }
    let c = constrained_density(&spec, zeta)?;
    let lo = c.l.min(spec.c);
    let hi = spec.d;
    let mut t = Table::new(vec!["x", "wachter", "constrained"]);
    t.extra.insert("gamma1".into(), json!(g1));
    t.extra.insert("gamma2".into(), json!(g2));
    t.extra.insert("cJ".into(), json!(spec.c));
    t.extra.insert("dJ".into(), json!(spec.d));
    t.extra.insert("zeta".into(), json!(c.zeta));
    t.extra.insert("L".into(), json!(c.l));
    for i in 0..a.resolution {
        // interior points only; both densities have integrable edge singularities
        let x = lo + (hi - lo) * (i as f64 + 0.5) / a.resolution as f64;
        t.push(vec![x.into(), spec.density(x).into(), c.density(x).into()]);
    }
    t.plot.x = 0;
    t.plot.ys = vec![1, 2];
    t.plot.vlines = vec![c.zeta];
    Ok(t)
}

fn cmd_rate(a: &RateArgs) -> Outcome<Table> {
    let (g1, g2) = a.jacobi.gammas();
    let spec = wachter(g1, g2)?;
    let zs = match &a.zeta_range {
        Some(r) => parse_range(r, a.resolution, false)?,
        None => parse_range(&format!("{}:{}", spec.d / 10.0, spec.d), a.resolution.max(2), false)?,
    };
    if zs[0] <= 0.0 || zs[zs.len() - 1] >= 1.0 {
        return param("wall positions must lie in (0, 1)");
    }
    let mut t = Table::new(vec!["zeta", "L", "rate"]);
    t.extra.insert("dJ".into(), json!(spec.d));
    for z in zs {
        let l = constrained_density(&spec, z)?.l;
        t.push(vec![z.into(), l.into(), rate_difference(&spec, z)?.into()]);
    }
    t.plot.x = 0;
    t.plot.ys = vec![2];
    t.plot.vlines = vec![spec.d];
    Ok(t)
}

fn cmd_identity(a: &IdentityArgs) -> Outcome<Table> {
    let (q0, q1) = (a.charges.q0, a.charges.q1);
    let w_cri = critical_w(q0, q1)?;
    let ws = match &a.w_range {
        Some(r) => parse_range(r, 50, a.log)?,
        None => (1..=50).map(|j| w_cri * (10.0 / w_cri).powf(j as f64 / 51.0)).collect(),
    };
    let mut t = Table::new(vec!["w", "zeta", "sphere", "jacobi", "residual"]);
    let mut worst: f64 = 0.0;
    for w in ws {
        let r = energy_identity_check(&ChargeConfig::new(q0, q1, w)?)?;
        worst = worst.max(r.residual);
        t.push(vec![w.into(), r.zeta.into(), r.sphere_side.into(), r.jacobi_side.into(), r.residual.into()]);
    }
    t.extra.insert("w_cri".into(), json!(w_cri));
    t.extra.insert("max_residual".into(), json!(worst));
    t.plot.x = 0;
    t.plot.ys = vec![2, 3];
    t.plot.vlines = vec![w_cri];
    Ok(t)
}

fn report_row(name: &str, r: &DualityReport) -> Vec<Cell> {
    let method = match r.method {
        sphere_coulomb::oracle::Method::Quadrature => "quadrature",
        sphere_coulomb::oracle::Method::MonteCarlo => "monte-carlo",
    };
    vec![
        name.into(),
        r.lhs.into(),
        r.rhs.into(),
        r.rel_err.into(),
        r.error_estimate.into(),
        method.into(),
    ]
}

fn cmd_duality(a: &DualityArgs) -> Outcome<Table> {
    if !(a.w >= 0.0 && a.w.is_finite()) {
        return param("w must be a nonnegative number");
    }
    let d = duality_check_small_n(a.n, a.r, a.k, a.w)?;
    let g = gap_rewrite_check(a.n, a.r, a.k, a.w)?;
    let mut t = Table::new(vec!["check", "lhs", "rhs", "rel_err", "error_estimate", "method"]);
    t.push(report_row("duality", &d));
    t.push(report_row("gap-rewrite", &g));
    if a.r > 0 {
        t.extra.insert("log_rewrite_constant".into(), json!(rewrite_constant_ln(a.n, a.r, a.k)?));
    }
    Ok(t)
}

fn cmd_sample(a: &SampleArgs) -> Outcome<Table> {
    let thin = a.thin.unwrap_or(a.n);
    let snaps = sample_with(a.q0, a.q1, a.w, a.n, a.sweeps, thin, a.seed)?;
    let mut t = Table::new(vec!["snapshot", "sweep", "index", "x", "y"]);
    for (s, snap) in snaps.iter().enumerate() {
        for (i, z) in snap.particles.iter().enumerate() {
            t.push(vec![s.into(), ((s + 1) * thin).into(), i.into(), z.re.into(), z.im.into()]);
        }
    }
    t.extra.insert("snapshots".into(), json!(snaps.len()));
    t.plot.x = 3;
    t.plot.ys = vec![4];
    t.plot.group = Some(2);
    t.plot.equal_axes = true;
    Ok(t)
}

fn cmd_soft_edge(a: &SoftEdgeArgs) -> Outcome<Table> {
    let ts = parse_range(&a.t_range, 101, false)?;
    if a.resolution == 0 {
        return param("--resolution must be positive");
    }
    let (q0, q1) = if a.charges.q0 >= a.charges.q1 {
        (a.charges.q0, a.charges.q1)
    } else {
        (a.charges.q1, a.charges.q0)
    };
    let scale = soft_edge_scale(q0, q1)?;
    let hm = HastingsMcLeod::global()?;
    let mut t = Table::new(vec!["t", "painleve", "fredholm", "q"]);
    t.extra.insert("scale".into(), json!(scale));
    for x in ts {
        t.push(vec![
            x.into(),
            painleve_gap(x)?.into(),
            airy_fredholm_gap(x, a.resolution)?.into(),
            hm.q(x)?.into(),
        ]);
    }
    t.plot.x = 0;
    t.plot.ys = vec![1, 2];
    Ok(t)
}

fn run(cli: &Cli) -> Outcome<()> {
    let (name, table, out, params) = match &cli.command {
        Command::Droplet(a) => ("droplet", cmd_droplet(a)?, &a.out, params_of(a)),
        Command::EnergyCurve(a) => ("energy-curve", cmd_energy(a)?, &a.out, params_of(a)),
        Command::JueDensity(a) => ("jue-density", cmd_jue_density(a)?, &a.out, params_of(a)),
        Command::RateCurve(a) => ("rate-curve", cmd_rate(a)?, &a.out, params_of(a)),
        Command::Identity(a) => ("identity", cmd_identity(a)?, &a.out, params_of(a)),
        Command::Duality(a) => ("duality", cmd_duality(a)?, &a.out, params_of(a)),
        Command::Sample(a) => ("sample", cmd_sample(a)?, &a.out, params_of(a)),
        Command::SoftEdge(a) => ("soft-edge", cmd_soft_edge(a)?, &a.out, params_of(a)),
    };
    let text = table.render(out.format, &Provenance::new(params));
    match destination(out.output.clone(), name, out.format) {
        Some(path) => write_atomic(&path, &text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Param(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numeric(m)) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
        Err(Failure::Io(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
