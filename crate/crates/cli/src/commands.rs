use std::path::Path;

use cheshire_core::optics::{calibrate_postselection, parse_circuit, run_monte_carlo};
use cheshire_core::scenarios::{build_pair, expected_pattern, ScenarioId};
use cheshire_core::solver::{assemble, parse_problem, solve_post, verify, ObservableSpec};
use cheshire_core::weakval::{
    converges_quadratically, pointer_sweep, sig12, weak_value, weak_value_report,
};
use cheshire_core::Error;
use serde_json::json;

use crate::render::{ket_csv, ket_json, print_json};
use crate::{Cli, Command, Emit, Failure, Format};

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Scenario { id } => scenario(cli, id),
        Command::Solve { problem } => solve(cli, problem),
        Command::Circuit { file, shots, emit } => circuit(cli, file, *shots, *emit),
        Command::Pointer {
            id,
            observable,
            couplings,
        } => pointer(cli, id, observable, couplings),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io(path.to_path_buf(), e))
}

fn verdict(ok: bool) -> Result<(), Failure> {
    if ok {
        Ok(())
    } else {
        Err(Failure::Mismatch)
    }
}

fn scenario(cli: &Cli, id: &str) -> Result<(), Failure> {
    let id: ScenarioId = id.parse()?;
    let pair = build_pair(id)?;
    let report = weak_value_report(&pair)?;
    let deviation = expected_pattern(id).max_deviation(&report);
    let ok = deviation < cli.tol;
    match cli.format {
        Format::Table => {
            println!("scenario {id}");
            print!("{}", report.to_table());
            println!(
                "pattern {} (max deviation {})",
                if ok { "match" } else { "MISMATCH" },
                sig12(deviation)
            );
        }
        Format::Csv => {
            print!("{}", report.to_csv());
            if !ok {
                eprintln!("pattern mismatch: max deviation {deviation:e}");
            }
        }
        Format::Json => print_json(&json!({
            "scenario": id.to_string(),
            "report": serde_json::to_value(report.to_serializable()).expect("report serializes"),
            "max_deviation": deviation,
            "match": ok,
        })),
    }
    verdict(ok)
}

fn solve(cli: &Cli, path: &Path) -> Result<(), Failure> {
    let problem = parse_problem(&read(path)?)?;
    let targets = problem.weak_value_targets()?;
    let post = solve_post(&assemble(&problem.pre, &targets)?)?;
    let residual = verify(&problem.pre, &post, &targets)?;
    let ok = residual < cli.tol;
    match cli.format {
        Format::Table => {
            print!("{}", post.to_text());
            println!("# residual {}", sig12(residual));
        }
        Format::Csv => {
            print!("{}", ket_csv(&post));
            println!("residual,{residual:?},");
        }
        Format::Json => print_json(&json!({
            "photons": post.photons(),
            "post": ket_json(&post),
            "residual": residual,
            "match": ok,
        })),
    }
    if !ok {
        eprintln!("residual {residual:e} exceeds tolerance {:e}", cli.tol);
    }
    verdict(ok)
}

fn circuit(cli: &Cli, path: &Path, shots: u64, emit: Emit) -> Result<(), Failure> {
    let parsed = parse_circuit(&read(path)?)?;
    let (circuit, residual) = match parsed.target() {
        Some(t) => {
            let cal = calibrate_postselection(&parsed, t)?;
            (cal.circuit, Some(cal.residual))
        }
        None => (parsed, None),
    };
    match emit {
        Emit::Probs => {
            let run = circuit.run_exact()?;
            match cli.format {
                Format::Table => {
                    if let Some(r) = residual {
                        println!("# calibration residual {}", sig12(r));
                    }
                    println!("{:<10}  {:>20}", "detector", "probability");
                    for o in &run.outcomes {
                        println!("{:<10}  {:>20}", o.label, sig12(o.probability));
                    }
                }
                Format::Csv => {
                    println!("detector,probability");
                    for o in &run.outcomes {
                        println!("{},{:?}", o.label, o.probability);
                    }
                }
                Format::Json => print_json(&json!({
                    "calibration_residual": residual,
                    "detectors": run.outcomes.iter().map(|o| json!({
                        "label": o.label, "probability": o.probability
                    })).collect::<Vec<_>>(),
                })),
            }
        }
        Emit::Counts => {
            let record = run_monte_carlo(&circuit, shots, cli.seed)?;
            match cli.format {
                Format::Table => {
                    println!("# shots {} seed {}", record.shots, record.seed);
                    println!("{:<10}  {:>12}", "detector", "count");
                    for (label, n) in &record.counts {
                        println!("{label:<10}  {n:>12}");
                    }
                }
                Format::Csv => {
                    println!("detector,count");
                    for (label, n) in &record.counts {
                        println!("{label},{n}");
                    }
                }
                Format::Json => print_json(&serde_json::to_value(&record).expect("record serializes")),
            }
        }
        Emit::ConditionalState => {
            let run = circuit.run_exact()?;
            match cli.format {
                Format::Json => print_json(&json!({
                    "detectors": run.outcomes.iter().map(|o| json!({
                        "label": o.label,
                        "probability": o.probability,
                        "state": o.state.as_ref().map(ket_json),
                    })).collect::<Vec<_>>(),
                })),
                Format::Table | Format::Csv => {
                    for o in run.outcomes.iter() {
                        println!("# detector {} probability {}", o.label, sig12(o.probability));
                        match &o.state {
                            Some(k) if cli.format == Format::Csv => print!("{}", ket_csv(k)),
                            Some(k) => print!("{}", k.to_text()),
                            None => println!("# never fires"),
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn pointer(cli: &Cli, id: &str, observable: &str, couplings: &[f64]) -> Result<(), Failure> {
    let id: ScenarioId = id.parse()?;
    let spec: ObservableSpec = observable.parse()?;
    if couplings.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Input("couplings must be strictly decreasing".into()).into());
    }
    let pair = build_pair(id)?;
    let op = spec.operator(pair.convention())?;
    let exact = weak_value(&op, &pair)?;
    let rows = pointer_sweep(&op, &pair, couplings)?;
    let ok = converges_quadratically(&rows);
    match cli.format {
        Format::Table => {
            println!("# {id} {spec} weak value {} {}", sig12(exact.re), sig12(exact.im));
            println!(
                "{:>12}  {:>20}  {:>20}  {:>20}",
                "g", "shift/g", "deviation", "im reading"
            );
            for r in &rows {
                println!(
                    "{:>12}  {:>20}  {:>20}  {:>20}",
                    format!("{:e}", r.coupling),
                    sig12(r.reading),
                    sig12(r.deviation),
                    sig12(r.imaginary_reading)
                );
            }
            println!("convergence {}", if ok { "quadratic" } else { "NOT quadratic" });
        }
        Format::Csv => {
            println!("g,reading,deviation,imaginary_reading,probability");
            for r in &rows {
                println!(
                    "{:?},{:?},{:?},{:?},{:?}",
                    r.coupling, r.reading, r.deviation, r.imaginary_reading, r.probability
                );
            }
        }
        Format::Json => print_json(&json!({
            "scenario": id.to_string(),
            "observable": spec.to_string(),
            "weak_value": [exact.re, exact.im],
            "rows": rows.iter().map(|r| json!({
                "g": r.coupling,
                "reading": r.reading,
                "deviation": r.deviation,
                "imaginary_reading": r.imaginary_reading,
                "probability": r.probability,
            })).collect::<Vec<_>>(),
            "quadratic": ok,
        })),
    }
    if !ok {
        eprintln!("pointer deviations do not shrink quadratically");
    }
    verdict(ok)
}
