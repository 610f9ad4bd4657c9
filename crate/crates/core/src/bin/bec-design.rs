use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use bec_design::bounds::{rate_upper_bound, threshold_upper_bound};
use bec_design::convergence::{check_convergent, threshold, DEFAULT_TOL};
use bec_design::design::{self, DesignResult};
use bec_design::io::{parse_pairs, parse_rho, EnsembleFile, RunManifest};
use bec_design::optimizer::{sweep_degree_sets, Method};
use bec_design::reproduce::{self, Target};
use bec_design::series::TaylorCoefficients;
use bec_design::sim::{monte_carlo, SimConfig};
use bec_design::{DegreeDistribution, Ensemble, Error, Result};

#[derive(Parser)]
#[command(name = "bec-design", version, about = "Deterministic LDPC ensemble design for the BEC")]
struct Cli {
    /// Structured JSON output instead of text summaries.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CategoryArg {
    Eps,
    Rate,
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeArg {
    A,
    B,
    Mb,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Lp,
    Grid,
}

#[derive(Subcommand)]
enum Command {
    /// Design a variable side for a fixed check side.
    Design {
        #[arg(long, value_enum)]
        category: CategoryArg,
        /// `regular:Dc`, `d:c,d:c,...` or an ensemble file.
        #[arg(long)]
        rho: String,
        #[arg(long, required_if_eq("category", "eps"))]
        eps: Option<f64>,
        #[arg(long, required_if_eq("category", "rate"))]
        rate: Option<f64>,
        #[arg(long = "type", value_enum, default_value = "a")]
        kind: TypeArg,
        #[arg(long = "P")]
        p: Option<usize>,
        /// Write the ensemble file here (manifest alongside).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check convergence of an ensemble at a channel parameter.
    Verify {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long)]
        eps: f64,
    },
    /// Threshold of an ensemble by bisection.
    Threshold {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Threshold and rate upper bounds.
    Bounds {
        #[arg(long, conflicts_with = "dc_bar")]
        rho: Option<String>,
        #[arg(long)]
        dc_bar: Option<f64>,
        #[arg(long)]
        rate: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        /// Report the ensemble's rate and threshold against the bounds.
        #[arg(long)]
        ensemble: Option<PathBuf>,
    },
    /// Taylor coefficients of the inverse check polynomial.
    Taylor {
        #[arg(long)]
        rho: String,
        #[arg(long, default_value_t = 20)]
        terms: usize,
    },
    /// Rate-optimal distributions over every degree set of a given size.
    Search {
        #[arg(long = "P")]
        p: usize,
        #[arg(long)]
        dv_max: u32,
        #[arg(long)]
        rho: String,
        #[arg(long)]
        eps: f64,
        /// Only sets that contain degree 2.
        #[arg(long)]
        require_two: bool,
        #[arg(long, value_enum, default_value = "lp")]
        method: MethodArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo word and bit erasure rates under peeling decoding.
    Simulate {
        #[arg(long)]
        ensemble: PathBuf,
        /// `start:stop:step` or a comma-separated list.
        #[arg(long)]
        eps: String,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a canned reproduction.
    Reproduce {
        target: String,
        #[command(flatten)]
        sim: SimArgs,
        /// Directory for CSV output and manifests.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EnsembleArgs {
    /// Ensemble file.
    #[arg(long, conflicts_with_all = ["lambda", "rho"])]
    ensemble: Option<PathBuf>,
    /// Variable side as `d:c,d:c,...`.
    #[arg(long, requires = "rho")]
    lambda: Option<String>,
    #[arg(long, requires = "lambda")]
    rho: Option<String>,
}

impl EnsembleArgs {
    fn load(&self) -> Result<Ensemble> {
        match (&self.ensemble, &self.lambda, &self.rho) {
            (Some(path), _, _) => Ok(EnsembleFile::load(path)?.ensemble),
            (None, Some(l), Some(r)) => Ok(Ensemble::new(
                DegreeDistribution::variable(parse_pairs(l)?)?,
                parse_rho(r)?,
            )),
            _ => Err(Error::Parse("give --ensemble or both --lambda and --rho".into())),
        }
    }
}

#[derive(Args)]
struct SimArgs {
    #[arg(long, default_value_t = 5000)]
    n: usize,
    #[arg(long, default_value_t = 100)]
    stop: u64,
    #[arg(long, default_value_t = 200)]
    max_iters: usize,
    #[arg(long, default_value_t = 10_000_000)]
    trial_cap: u64,
    #[arg(long, env = "BEC_DESIGN_SEED", default_value_t = 1)]
    seed: u64,
    /// Reuse one sampled graph for all trials.
    #[arg(long)]
    fixed_graph: bool,
    #[arg(long)]
    remove_multi_edges: bool,
}

impl SimArgs {
    fn config(&self) -> SimConfig {
        SimConfig {
            n: self.n,
            max_iters: self.max_iters,
            stop_target: self.stop,
            trial_cap: self.trial_cap,
            fixed_graph: self.fixed_graph,
            remove_multi_edges: self.remove_multi_edges,
        }
    }

    fn params(&self) -> Value {
        json!({
            "n": self.n, "stop": self.stop, "max_iters": self.max_iters,
            "trial_cap": self.trial_cap, "fixed_graph": self.fixed_graph,
            "remove_multi_edges": self.remove_multi_edges,
        })
    }
}

fn parse_eps_list(s: &str) -> Result<Vec<f64>> {
    let bad = |part: &str| Error::Parse(format!("`{s}`: bad number `{part}`"));
    let num = |part: &str| part.trim().parse::<f64>().map_err(|_| bad(part));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(Error::Parse(format!("`{s}`: need start <= stop and step > 0")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|k| a + step * k as f64).collect())
        }
        [_] => s.split(',').map(num).collect(),
        _ => Err(Error::Parse(format!("`{s}`: expected start:stop:step or a list"))),
    }
}

fn make_design(
    category: CategoryArg,
    rho: &DegreeDistribution,
    value: f64,
    kind: TypeArg,
    p: Option<usize>,
) -> Result<DesignResult> {
    let need_p = || p.ok_or_else(|| Error::Parse("--P is required for type b and mb".into()));
    match (category, kind) {
        (CategoryArg::Eps, TypeArg::A) => design::type_a_eps(rho, value),
        (CategoryArg::Eps, TypeArg::B) => design::type_b_eps(rho, value, need_p()?),
        (CategoryArg::Eps, TypeArg::Mb) => design::type_mb_eps(rho, value, need_p()?),
        (CategoryArg::Rate, TypeArg::A) => design::type_a_rate(rho, value),
        (CategoryArg::Rate, TypeArg::B) => design::type_b_rate(rho, value, need_p()?),
        (CategoryArg::Rate, TypeArg::Mb) => design::type_mb_rate(rho, value, need_p()?),
    }
}

fn emit(json_mode: bool, text: &str, value: Value) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(&value).expect("json values serialize"));
    } else {
        print!("{text}");
    }
}

fn coeffs(d: &DegreeDistribution) -> Value {
    d.iter()
        .map(|(k, c)| (k.to_string(), json!(c)))
        .collect::<serde_json::Map<_, _>>()
        .into()
}

fn write_artifact(path: &Path, contents: &str, manifest: &RunManifest) -> Result<()> {
    manifest.write_with(path, contents)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let j = cli.json;
    match cli.command {
        Command::Design {
            category,
            rho,
            eps,
            rate,
            kind,
            p,
            out,
        } => {
            let rho_d = parse_rho(&rho)?;
            let value = match category {
                CategoryArg::Eps => eps.expect("required by clap"),
                CategoryArg::Rate => rate.expect("required by clap"),
            };
            let d = make_design(category, &rho_d, value, kind, p)?;
            let mut file = EnsembleFile::new(d.ensemble.clone());
            file.meta = json!({
                "type": d.kind, "category": d.category, "N": d.n, "D_v": d.dv, "P": d.p,
                "design_eps": d.design_eps, "design_rate": d.design_rate,
            });
            if let Some(path) = &out {
                let manifest = RunManifest::new(
                    "design",
                    json!({"category": d.category, "rho": rho, "eps": eps, "rate": rate, "type": d.kind, "P": p}),
                    None,
                );
                write_artifact(path, &(file.to_json() + "\n"), &manifest)?;
            }
            let text = format!("{}\nlambda(x) = {}\n", d.summary(), d.lambda());
            let mut value = file.meta.clone();
            value["lambda"] = coeffs(d.lambda());
            value["rho"] = coeffs(&d.ensemble.rho);
            emit(j, &text, value);
        }
        Command::Verify { ensemble, eps } => {
            let e = ensemble.load()?;
            let v = check_convergent(&e, eps);
            let word = if v.convergent { "convergent" } else { "non-convergent" };
            let text = format!(
                "{word} at eps = {eps} (min margin {:.3e} at x = {:.6})\n",
                v.margin, v.witness_x
            );
            emit(
                j,
                &text,
                json!({"eps": eps, "convergent": v.convergent, "margin": v.margin, "witness_x": v.witness_x}),
            );
        }
        Command::Threshold { ensemble, tol } => {
            let e = ensemble.load()?;
            let th = threshold(&e, tol);
            let text = format!("threshold {th:.4}\nrate {:.4}\n", e.design_rate());
            emit(j, &text, json!({"threshold": th, "rate": e.design_rate()}));
        }
        Command::Bounds {
            rho,
            dc_bar,
            rate,
            eps,
            ensemble,
        } => {
            let loaded = ensemble.as_deref().map(EnsembleFile::load).transpose()?;
            let dc_bar = match (dc_bar, &rho, &loaded) {
                (Some(x), _, _) => x,
                (None, Some(r), _) => parse_rho(r)?.average_degree(),
                (None, None, Some(f)) => f.ensemble.rho.average_degree(),
                _ => return Err(Error::Parse("give --rho, --dc-bar or --ensemble".into())),
            };
            let rate = rate.or(loaded.as_ref().map(|f| f.ensemble.design_rate()));
            let th = loaded.as_ref().map(|f| threshold(&f.ensemble, DEFAULT_TOL));
            let eps = eps.or(th);
            if rate.is_none() && eps.is_none() {
                return Err(Error::Parse("give --rate, --eps or --ensemble".into()));
            }
            let mut text = format!("average check degree {dc_bar:.4}\n");
            let mut value = json!({"dc_bar": dc_bar});
            if let Some(r) = rate {
                let z = threshold_upper_bound(r, dc_bar);
                text += &format!("threshold bound at R = {r:.4}: {z:.4}\n");
                value["threshold_bound"] = json!(z);
                if let Some(t) = th {
                    text += &format!("threshold {t:.4}, ratio {:.4}\n", t / z);
                    value["threshold_ratio"] = json!(t / z);
                }
            }
            if let Some(e) = eps {
                let b = rate_upper_bound(e, dc_bar);
                text += &format!("rate bound at eps = {e:.4}: {b:.4}\n");
                value["rate_bound"] = json!(b);
                if let Some(r) = rate.filter(|_| loaded.is_some()) {
                    text += &format!("rate {r:.4}, ratio {:.4}\n", r / b);
                    value["rate_ratio"] = json!(r / b);
                }
            }
            emit(j, &text, value);
        }
        Command::Taylor { rho, terms } => {
            let r = parse_rho(&rho)?;
            let t = TaylorCoefficients::for_rho(&r, terms.max(2))?;
            let mut text = String::from("i  T_i  partial_sum\n");
            for (i, ti) in t.iter() {
                text += &format!("{i} {ti:.10} {:.10}\n", t.partial_sum(i));
            }
            let value = json!({
                "T": t.iter().map(|(i, ti)| json!({"i": i, "T": ti})).collect::<Vec<_>>(),
                "tail_mass": t.tail_mass(),
            });
            emit(j, &text, value);
        }
        Command::Search {
            p,
            dv_max,
            rho,
            eps,
            require_two,
            method,
            out,
        } => {
            let r = parse_rho(&rho)?;
            let method = match method {
                MethodArg::Lp => Method::Lp,
                MethodArg::Grid => Method::Grid,
            };
            let rows = sweep_degree_sets(p, dv_max, &r, eps, require_two, method)?;
            let mut csv = String::from("degrees,rate,rate_over_bound,method,lambda\n");
            for row in &rows {
                let degs = format!("{:?}", row.degree_set).replace(' ', "");
                match &row.report {
                    Some(rep) => {
                        csv += &format!(
                            "\"{degs}\",{:.4},{:.4},{},\"{}\"\n",
                            rep.best_rate, rep.ratio_to_bound, rep.method, rep.best_lambda
                        )
                    }
                    None => csv += &format!("\"{degs}\",,,{},infeasible\n", method),
                }
            }
            if let Some(path) = &out {
                let manifest = RunManifest::new(
                    "search",
                    json!({"P": p, "dv_max": dv_max, "rho": rho, "eps": eps, "require_two": require_two, "method": method}),
                    None,
                );
                write_artifact(path, &csv, &manifest)?;
            }
            let value = rows
                .iter()
                .map(|row| {
                    json!({
                        "degrees": row.degree_set,
                        "rate": row.report.as_ref().map(|x| x.best_rate),
                        "ratio": row.report.as_ref().map(|x| x.ratio_to_bound),
                        "lambda": row.report.as_ref().map(|x| coeffs(&x.best_lambda)),
                    })
                })
                .collect();
            emit(j, &csv, value);
        }
        Command::Simulate {
            ensemble,
            eps,
            sim,
            out,
        } => {
            let e = EnsembleFile::load(&ensemble)?.ensemble;
            let list = parse_eps_list(&eps)?;
            let curve = monte_carlo(&e, &list, &sim.config(), sim.seed)?;
            let csv = curve.to_csv()?;
            if let Some(path) = &out {
                let mut params = sim.params();
                params["ensemble"] = json!(ensemble.display().to_string());
                params["eps"] = json!(list);
                let manifest = RunManifest::new("simulate", params, Some(sim.seed));
                write_artifact(path, &csv, &manifest)?;
            }
            emit(j, &csv, serde_json::to_value(&curve)?);
        }
        Command::Reproduce { target, sim, out } => {
            let t: Target = target.parse()?;
            let r = reproduce::run(t, &sim.config(), sim.seed)?;
            if let (Some(dir), Some(csv)) = (&out, &r.csv) {
                std::fs::create_dir_all(dir)?;
                let mut params = sim.params();
                params["target"] = json!(t.name());
                let seed = (t == Target::Fig1).then_some(sim.seed);
                let manifest = RunManifest::new("reproduce", params, seed);
                write_artifact(&dir.join(format!("{}.csv", t.name())), csv, &manifest)?;
            }
            emit(j, &r.text, r.json);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible_design() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
