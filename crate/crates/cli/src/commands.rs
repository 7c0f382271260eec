use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde_json::{json, Value};
use tasep_core::exact::{
    stationary_weights_matrix, stationary_weights_recursive, tle_top_marginal, WeightTable,
};
use tasep_core::fluctuations::{sample_scaled_processes, simulate_limit_process, ScalingConfig};
use tasep_core::io::{bits_string, pack_sample, write_csv_header};
use tasep_core::ldp::{
    finite_n_ldp_check, rate_density, rate_density_variational, rate_height_closed, rate_height_variational,
};
use tasep_core::markov::{build_generator, solve_stationary, GENERATOR_CAP};
use tasep_core::rng::stream_rng;
use tasep_core::sampler::{height_endpoint_distribution, PartitionTable};
use tasep_core::stats::compare_distributions;
use tasep_core::verify::{run_suite, Corruption, SuiteConfig, MARGINAL_TOL};
use tasep_core::{normalization_k, Error, Occupation, Params, Profile};

use crate::args::*;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Core(Error),
    Verification(String),
    Io(io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Io(_) => 1,
            Failure::Core(Error::Domain { .. }) => 2,
            Failure::Core(Error::Resource { .. }) => 3,
            Failure::Core(Error::NumericConsistency(_) | Error::Solver { .. }) | Failure::Verification(_) => 4,
            Failure::Core(Error::Io(_)) => 1,
        }
    }

    pub fn message(&self) -> String {
        match self {
            Failure::Usage(m) => m.clone(),
            Failure::Core(e) => format!("error: {e}"),
            Failure::Verification(m) => format!("verification failed: {m}"),
            Failure::Io(e) => format!("error: {e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<(), Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(format!("error: {}", msg.into()))
}

fn open_out(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&PathBuf>, value: &Value) -> Outcome {
    let mut w = open_out(path.map(PathBuf::as_path))?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

/// Resolves the single boundary parameterization; `(u, v)` needs `n`.
fn boundary(b: &BoundaryArgs, n: Option<usize>) -> Result<Params, Failure> {
    let pairs = [
        ("alpha/beta", b.alpha, b.beta),
        ("a/b", b.a, b.b),
        ("u/v", b.u, b.v),
    ];
    let given: Vec<_> = pairs.iter().filter(|p| p.1.is_some() || p.2.is_some()).collect();
    match given.as_slice() {
        [] => Err(usage("one of --alpha/--beta, --a/--b or --u/--v is required")),
        [(name, Some(x), Some(y))] => Ok(match *name {
            "alpha/beta" => Params::from_rates(*x, *y)?,
            "a/b" => Params::from_ab(*x, *y)?,
            _ => {
                let n = n.ok_or_else(|| usage("--u/--v requires --n"))?;
                Params::from_scaling(*x, *y, n)?
            }
        }),
        [(name, _, _)] => Err(usage(format!("both values of {name} are required"))),
        _ => Err(usage("give exactly one of --alpha/--beta, --a/--b or --u/--v")),
    }
}

fn params_json(p: &Params) -> Value {
    json!({ "alpha": p.alpha, "beta": p.beta, "a": p.a, "b": p.b })
}

pub fn dispatch(cmd: Command) -> Outcome {
    match cmd {
        Command::Stationary(a) => stationary(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a),
        Command::Fluct(a) => fluct(a),
        Command::Ldp { command } => match command {
            LdpCommand::Rate(a) => ldp_rate(a),
            LdpCommand::Density(a) => ldp_density(a),
            LdpCommand::Check(a) => ldp_check(a),
        },
        Command::Phase(a) => phase(a),
    }
}

fn stationary(args: StationaryArgs) -> Outcome {
    let p = boundary(&args.boundary, Some(args.n))?;
    let table = match args.route {
        Route::Recursion => stationary_weights_recursive(args.n, p.a, p.b)?,
        Route::Matrix => stationary_weights_matrix(args.n, p.a, p.b)?,
        Route::Enumeration => WeightTable::from_weights(args.n, p.a, p.b, tle_top_marginal(args.n, p.a, p.b)?),
    };
    let probs = table.probabilities_f64();
    let oracle = if args.oracle {
        if args.n > GENERATOR_CAP {
            return Err(Error::Resource { what: "n", value: args.n, cap: GENERATOR_CAP }.into());
        }
        let generator = build_generator(args.n, p.alpha, p.beta)?;
        let pi = solve_stationary(&generator)?;
        let err = pi.iter().zip(&probs).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        Some((pi, err, generator.residual(&probs)))
    } else {
        None
    };

    let configs: Vec<String> = (0..probs.len()).map(|i| Occupation::from_index(i, args.n).to_string()).collect();
    match args.format {
        Format::Csv => {
            let mut w = open_out(args.out.as_deref())?;
            let mut cols = vec!["config", "weight", "probability"];
            if oracle.is_some() {
                cols.push("generator");
            }
            write_csv_header(&mut w, &cols)?;
            for (i, c) in configs.iter().enumerate() {
                write!(w, "{c},{},{}", table.weights[i], probs[i])?;
                match &oracle {
                    Some((pi, _, _)) => writeln!(w, ",{}", pi[i])?,
                    None => writeln!(w)?,
                }
            }
            w.flush()?;
        }
        Format::Json => {
            let mut v = json!({
                "n": args.n,
                "route": format!("{:?}", args.route).to_lowercase(),
                "z": table.z,
                "configs": configs,
                "weights": table.weights,
                "probabilities": probs,
            });
            v.as_object_mut().unwrap().extend(params_json(&p).as_object().unwrap().clone());
            if let Some((_, err, residual)) = &oracle {
                v["oracle"] = json!({ "max_abs_error": err, "generator_residual": residual, "tol": MARGINAL_TOL });
            }
            write_json(args.out.as_ref(), &v)?;
        }
    }
    if let Some((_, err, _)) = oracle {
        eprintln!("generator oracle: max abs error {err:e}");
        if err > MARGINAL_TOL {
            return Err(Failure::Verification(format!("generator differs by {err:e}")));
        }
    }
    Ok(())
}

fn parse_corruption(s: &str) -> Result<Corruption, Failure> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || usage(format!("--corrupt-weight expects N:INDEX:FACTOR, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    Ok(Corruption {
        n: parts[0].parse().map_err(|_| bad())?,
        index: parts[1].parse().map_err(|_| bad())?,
        factor: parts[2].parse().map_err(|_| bad())?,
    })
}

fn verify(args: VerifyArgs) -> Outcome {
    if args.n_max == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    if args.n_max > GENERATOR_CAP {
        return Err(Error::Resource { what: "n_max", value: args.n_max, cap: GENERATOR_CAP }.into());
    }
    let mut cfg = SuiteConfig { sizes: (1..=args.n_max).collect(), ..SuiteConfig::default() };
    if !args.points.is_empty() {
        cfg.points = args
            .points
            .iter()
            .map(|s| {
                let (a, b) = s.split_once(':').ok_or_else(|| usage(format!("point {s:?} is not a:b")))?;
                let parse = |x: &str| x.trim().parse::<f64>().map_err(|_| usage(format!("bad number in {s:?}")));
                Ok((parse(a)?, parse(b)?))
            })
            .collect::<Result<_, Failure>>()?;
    }
    cfg.corrupt = args.corrupt_weight.as_deref().map(parse_corruption).transpose()?;
    let report = run_suite(&cfg)?;
    let value = serde_json::to_value(&report).map_err(io::Error::from)?;
    write_json(args.out.as_ref(), &value)?;
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
    eprintln!("{} checks, {} failed", report.checks.len(), failed.len());
    match failed.first() {
        None => Ok(()),
        Some(c) => Err(Failure::Verification(format!(
            "{} at n={} (a,b)=({},{}): error {:e} > {:e}",
            c.check, c.n, c.a, c.b, c.max_abs_error, c.tol
        ))),
    }
}

const CHUNK: usize = 4096;

fn sample(args: SampleArgs) -> Outcome {
    let p = boundary(&args.boundary, Some(args.n))?;
    let mut w = open_out(args.out.as_deref())?;
    if args.endpoint {
        let law = height_endpoint_distribution(args.n, p.a, p.b)?;
        write_csv_header(&mut w, &["k", "probability"])?;
        for (k, q) in law.iter().enumerate() {
            writeln!(w, "{k},{q}")?;
        }
        w.flush()?;
        return Ok(());
    }
    let seed = args.seed.ok_or_else(|| usage("--seed is required for sampling"))?;
    let table = PartitionTable::build(args.n, p.a, p.b)?;
    match args.format {
        SampleFormat::Csv => write_csv_header(&mut w, &["sample", "top", "bottom"])?,
        SampleFormat::Bin => w.write_all(&(args.n as u32).to_le_bytes())?,
    }
    let mut start = 0;
    while start < args.count {
        let end = (start + CHUNK).min(args.count);
        let rows = table.map_sample_range(start..end, seed, |top, bottom| match args.format {
            SampleFormat::Csv => format!("{},{}\n", bits_string(top), bits_string(bottom)).into_bytes(),
            SampleFormat::Bin => {
                let mut buf = Vec::new();
                pack_sample(top, bottom, &mut buf);
                buf
            }
        });
        for (i, row) in rows.iter().enumerate() {
            if args.format == SampleFormat::Csv {
                write!(w, "{},", start + i)?;
            }
            w.write_all(row)?;
        }
        start = end;
    }
    w.flush()?;
    Ok(())
}

fn fluct(args: FluctArgs) -> Outcome {
    if args.count == 0 {
        return Err(usage("--count must be positive"));
    }
    let cfg = ScalingConfig::new(args.u, args.v, args.n, args.mesh.clone())?;
    let p = cfg.params()?;
    let tle = sample_scaled_processes(&cfg, args.count, args.seed)?;
    let limit_count = args.limit_count.unwrap_or(args.count);
    // disjoint from the sampler streams
    let limit_seed: u64 = stream_rng(args.seed, u64::MAX).random();
    let lim = simulate_limit_process(args.u, args.v, args.n_steps, limit_count, limit_seed, &cfg.mesh)?;
    if let Some(msg) = &lim.warning {
        eprintln!("warning: {msg}");
    }

    let mut rows = Vec::new();
    for (k, &x) in cfg.mesh.iter().enumerate() {
        let full = compare_distributions(&tle.w1_at(k), &lim.b_plus_x_at(k), None)?;
        let minus = compare_distributions(&tle.w_minus_at(k), &lim.omega_at(k), Some(&lim.weights))?;
        rows.push(json!({
            "x": x,
            "w1_vs_b_plus_x": { "ks": full.ks, "w1": full.w1 },
            "w_minus_vs_omega": { "ks": minus.ks, "w1": minus.w1 },
        }));
    }
    let mut summary = json!({
        "u": args.u,
        "v": args.v,
        "n": args.n,
        "count": args.count,
        "limit_count": limit_count,
        "n_steps": args.n_steps,
        "seed": args.seed,
        "kappa_hat": lim.kappa_hat,
        "ess": lim.ess,
        "warning": lim.warning,
        "mesh": rows,
    });
    summary.as_object_mut().unwrap().extend(params_json(&p).as_object().unwrap().clone());
    write_json(args.out.as_ref(), &summary)?;

    if let Some(path) = &args.tle_csv {
        let mut w = open_out(Some(path))?;
        write_csv_header(&mut w, &["x", "sample_id", "value"])?;
        for (k, &x) in cfg.mesh.iter().enumerate() {
            for (i, val) in tle.w1_at(k).iter().enumerate() {
                writeln!(w, "{x},{i},{val}")?;
            }
        }
        w.flush()?;
    }
    if let Some(path) = &args.limit_csv {
        let mut w = open_out(Some(path))?;
        let cols: Vec<String> = ["sample_id".to_string(), "weight".to_string()]
            .into_iter()
            .chain(cfg.mesh.iter().map(|x| format!("omega_{x}")))
            .collect();
        writeln!(w, "{}", cols.join(","))?;
        let width = cfg.mesh.len();
        for (i, wt) in lim.weights.iter().enumerate() {
            write!(w, "{i},{wt}")?;
            for val in &lim.omega[i * width..(i + 1) * width] {
                write!(w, ",{val}")?;
            }
            writeln!(w)?;
        }
        w.flush()?;
    }
    Ok(())
}

/// Reads `x,f(x)` pairs; a first line that does not parse is taken as a header.
fn read_profile(path: &Path) -> Result<Profile, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let (mut xs, mut fs) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed = line.split_once(',').and_then(|(x, f)| Some((x.trim().parse().ok()?, f.trim().parse().ok()?)));
        match parsed {
            Some((x, f)) => {
                xs.push(x);
                fs.push(f);
            }
            None if i == 0 => {}
            None => return Err(Error::Domain { param: "profile", reason: format!("line {}: {line:?}", i + 1) }.into()),
        }
    }
    Ok(Profile::new(xs, fs)?)
}

fn region_name(p: &Params) -> &'static str {
    if p.ab() > 1.0 {
        "shock"
    } else if p.ab() < 1.0 {
        "fan"
    } else {
        "boundary"
    }
}

fn ldp_rate(args: LdpRateArgs) -> Outcome {
    let p = boundary(&args.boundary, args.n)?;
    let f = read_profile(&args.profile)?;
    let mut v = json!({
        "knots": f.knots(),
        "values": f.values(),
        "admissible": f.is_admissible(),
        "region": region_name(&p),
        "phase": format!("{:?}", p.phase().region),
        "k": normalization_k(p.a, p.b)?,
    });
    v.as_object_mut().unwrap().extend(params_json(&p).as_object().unwrap().clone());
    if args.method != Method::Variational {
        let c = rate_height_closed(&f, p.a, p.b)?;
        v["rate"] = json!(c.rate);
        v["diagnostics"] = json!({ "y_star": c.y_star, "x1": c.x1, "x2": c.x2, "candidate_gap": null });
    }
    if args.method != Method::Closed {
        let r = rate_height_variational(&f, p.a, p.b, args.mesh)?;
        if args.method == Method::Variational {
            v["rate"] = json!(r.rate);
            v["diagnostics"] = json!({ "y_star": r.y_star, "x1": null, "x2": null });
        }
        v["variational"] = json!({
            "rate": r.rate,
            "mesh": args.mesh,
            "numerical": r.numerical,
            "structured": r.structured,
            "lower_bound": r.lower_bound,
            "iterations": r.iterations,
        });
        v["diagnostics"]["candidate_gap"] = json!(r.candidate_gap);
    }
    write_json(args.out.as_ref(), &v)
}

fn ldp_density(args: LdpDensityArgs) -> Outcome {
    let p = boundary(&args.boundary, args.n)?;
    let mut rows = Vec::new();
    for &r in &args.r {
        let mut row = json!({ "r": r, "rate": rate_density(r, p.a, p.b)? });
        if args.variational {
            row["variational"] = json!(rate_density_variational(r, p.a, p.b)?);
        }
        rows.push(row);
    }
    let mut v = json!({ "region": region_name(&p), "rho_bar": p.phase().rho_bar, "rows": rows });
    v.as_object_mut().unwrap().extend(params_json(&p).as_object().unwrap().clone());
    write_json(args.out.as_ref(), &v)
}

fn ldp_check(args: LdpCheckArgs) -> Outcome {
    let p = boundary(&args.boundary, Some(args.n))?;
    let rows = args
        .r
        .iter()
        .map(|&r| Ok(serde_json::to_value(finite_n_ldp_check(args.n, p.a, p.b, r)?).map_err(io::Error::from)?))
        .collect::<Result<Vec<_>, Failure>>()?;
    let mut v = json!({ "rows": rows });
    v.as_object_mut().unwrap().extend(params_json(&p).as_object().unwrap().clone());
    write_json(args.out.as_ref(), &v)
}

fn phase(args: PhaseArgs) -> Outcome {
    let p = boundary(&args.boundary, args.n)?;
    let info = p.phase();
    let mut v = json!({
        "ab": p.ab(),
        "region": format!("{:?}", info.region),
        "rho_bar": info.rho_bar,
        "fan": info.fan,
        "shock": info.shock,
        "coexistence": info.coexistence,
        "k": normalization_k(p.a, p.b)?,
    });
    v.as_object_mut().unwrap().extend(params_json(&p).as_object().unwrap().clone());
    write_json(args.out.as_ref(), &v)
}
