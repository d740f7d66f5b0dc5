//! Thin command-line front end over the gaq library.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed (witness
//! in the report), 2 usage or spec error.

use clap::{Args, Parser, Subcommand};
use gaq::enveloping::{anomaly_scan, check_ho_polarization, PbwAlgebra, ScanResult};
use gaq::group_model::{registry_get, verify_cocycle, verify_group_axioms, RegistryEntry};
use gaq::invariant_calculus::{
    curvature, dual_forms, left_fields, noether_invariants, quantization_form, right_fields,
    sigma_normal_form,
};
use gaq::lie_structure::{
    characteristic_of_algebra, characteristic_of_group, jacobi_check, parse_elements,
    structure_constants, table_from_algebra, validate_polarization,
};
use gaq::report::{CheckRecord, Report, Status};
use gaq::representations::{
    apply_polarization, hermite_residual_check, reduce_right_action, registry_scenario,
    su2_rep_matrices,
};
use num_rational::BigRational;
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gaq",
    about = "Group-approach quantization: derive invariant fields, quantization 1-forms, polarizations and representations from a group law with a U(1) cocycle",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Write the JSON report here.
    #[arg(long, global = true)]
    json: Option<std::path::PathBuf>,
    /// Engine seed (also honours GAQ_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(flatten)]
    pins: PinArgs,
}

#[derive(Args, Clone, Default)]
struct PinArgs {
    /// Pin hbar to an exact rational (e.g. 1 or 1/2).
    #[arg(long, global = true)]
    hbar: Option<String>,
    /// Pin the mass m.
    #[arg(long, global = true)]
    m: Option<String>,
    /// Pin the frequency omega.
    #[arg(long, global = true)]
    omega: Option<String>,
    /// Pin the spin parameter j.
    #[arg(long, global = true, allow_hyphen_values = true)]
    j: Option<String>,
    /// Pin the pseudo-extension parameter k.
    #[arg(long, global = true, allow_hyphen_values = true)]
    k: Option<String>,
    /// Generic pin `name=value` (repeatable).
    #[arg(long = "pin", global = true)]
    pin: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Verify group and cocycle axioms of a registry spec.
    Verify {
        spec: String,
        /// Random trials per axiom.
        #[arg(long, default_value_t = 40)]
        trials: usize,
    },
    /// Print the left/right invariant vector field tables.
    Fields { spec: String },
    /// Print the quantization 1-form, its curvature and the normal form.
    Theta { spec: String },
    /// Print the commutator table of the invariant basis.
    Brackets { spec: String },
    /// Compute the characteristic subalgebra Ker Theta ∩ Ker dTheta.
    CharSubalgebra { spec: String },
    /// Validate a first-order polarization, e.g. --set "L_a, L_p".
    Polarize {
        spec: String,
        #[arg(long)]
        set: String,
    },
    /// Check a higher-order polarization, e.g.
    /// --set "L_t - (i*hbar/(2*m))*L_x^2, L_p".
    HoPolarize {
        spec: String,
        #[arg(long)]
        set: String,
    },
    /// Scan the closure obstructions of the second-order template over a
    /// parameter.
    AnomalyScan {
        spec: String,
        #[arg(long)]
        param: String,
    },
    /// Solve/verify a named registry polarization and reduce the right
    /// actions (e.g. --polarization Pq).
    Represent {
        spec: String,
        #[arg(long)]
        polarization: String,
    },
    /// Spin-j matrices, Casimir and weights of SU(2).
    Su2Matrices {
        #[arg(long)]
        j: String,
    },
    /// Hermite residual oracle for the oscillator level n.
    Hermite {
        #[arg(long)]
        n: u32,
    },
    /// Run every acceptance scenario.
    ReplayPaper,
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix('-') {
        return parse_rational(rest).map(|r| -r);
    }
    if let Some((n, d)) = s.split_once('/') {
        let n: num_bigint::BigInt = n.trim().parse().map_err(|_| format!("bad rational {s}"))?;
        let d: num_bigint::BigInt = d.trim().parse().map_err(|_| format!("bad rational {s}"))?;
        return Ok(BigRational::new(n, d));
    }
    if s.contains('.') {
        let (i, f) = s.split_once('.').unwrap();
        let mut num: num_bigint::BigInt = if i.is_empty() {
            0.into()
        } else {
            i.parse().map_err(|_| format!("bad rational {s}"))?
        };
        let mut den: num_bigint::BigInt = 1.into();
        for ch in f.chars() {
            let d = ch.to_digit(10).ok_or(format!("bad rational {s}"))?;
            num = num * 10 + d;
            den *= 10;
        }
        return Ok(BigRational::new(num, den));
    }
    s.parse::<num_bigint::BigInt>()
        .map(BigRational::from_integer)
        .map_err(|_| format!("bad rational {s}"))
}

fn collect_pins(args: &PinArgs) -> Result<BTreeMap<String, BigRational>, String> {
    let mut pins = BTreeMap::new();
    for (name, v) in [
        ("hbar", &args.hbar),
        ("m", &args.m),
        ("omega", &args.omega),
        ("j", &args.j),
        ("k", &args.k),
    ] {
        if let Some(v) = v {
            pins.insert(name.to_string(), parse_rational(v)?);
        }
    }
    for raw in &args.pin {
        let (name, v) = raw
            .split_once('=')
            .ok_or_else(|| format!("--pin needs name=value, got `{raw}`"))?;
        pins.insert(name.trim().to_string(), parse_rational(v)?);
    }
    Ok(pins)
}

enum Entry {
    Group(gaq::group_model::GroupSpec),
    Algebra(gaq::group_model::AbstractAlgebraSpec),
}

fn load(spec: &str, pins: &BTreeMap<String, BigRational>) -> Result<Entry, String> {
    match registry_get(spec) {
        Ok(RegistryEntry::Group(g)) => Ok(Entry::Group(g.with_pins(pins))),
        Ok(RegistryEntry::Algebra(a)) => Ok(Entry::Algebra(a.with_pins(pins))),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let seed = cli.seed.unwrap_or_else(gaq::engine_seed);
    let pins = match collect_pins(&cli.pins) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let pin_strings: BTreeMap<String, String> =
        pins.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();

    match run(&cli, seed, &pins, &pin_strings) {
        Ok(report) => {
            print!("{}", report.render_text());
            if let Some(path) = &cli.json {
                if let Err(e) = std::fs::write(path, report.to_json()) {
                    eprintln!("error: cannot write report: {e}");
                    return ExitCode::from(2);
                }
            }
            if report.all_passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(
    cli: &Cli,
    seed: u64,
    pins: &BTreeMap<String, BigRational>,
    pin_strings: &BTreeMap<String, String>,
) -> Result<Report, String> {
    match &cli.command {
        Command::Verify { spec, trials } => {
            let mut report = Report::new("verify", spec, pin_strings, seed);
            match load(spec, pins)? {
                Entry::Group(g) => {
                    let axioms = verify_group_axioms(&g, *trials, seed);
                    for c in &axioms.checks {
                        report.push(
                            CheckRecord::new(&format!("axiom-{}", c.name), c.passed())
                                .detail("symbolic", format!("{:?}", c.symbolic))
                                .detail("trials", c.trials as u64)
                                .detail("failures", c.failures as u64)
                                .with_witness(c.witness.clone()),
                        );
                    }
                    let coc = verify_cocycle(&g, (*trials).max(40), seed);
                    report.push(CheckRecord::new("cocycle-normalization", coc.identity_at_e));
                    report.push(
                        CheckRecord::new("cocycle-additivity", coc.additivity.passed())
                            .detail("trials", coc.additivity.trials as u64)
                            .with_witness(coc.additivity.witness.clone()),
                    );
                    if let Some(sv) = &coc.single_valuedness {
                        report.push(
                            CheckRecord::new("cocycle-single-valuedness", sv.failures == 0)
                                .detail("branch_events", sv.branch_events as u64)
                                .detail("max_violation", sv.max_violation)
                                .with_witness(sv.witness.clone()),
                        );
                    }
                }
                Entry::Algebra(a) => {
                    let t = table_from_algebra(&a);
                    let j = jacobi_check(&t);
                    report.push(
                        CheckRecord::new("jacobi", j.passed)
                            .with_witness(j.witness.map(|w| format!("{w:?}"))),
                    );
                }
            }
            Ok(report)
        }
        Command::Fields { spec } => {
            let mut report = Report::new("fields", spec, pin_strings, seed);
            let g = match load(spec, pins)? {
                Entry::Group(g) => g,
                Entry::Algebra(_) => {
                    return Err("abstract algebras have no coordinate fields".into())
                }
            };
            let mut rec = CheckRecord::new("left-fields", true);
            for f in left_fields(&g) {
                rec = rec.detail(&format!("X^L_{}", f.label), f.render(&g));
            }
            report.push(rec);
            let mut rec = CheckRecord::new("right-fields", true);
            for f in right_fields(&g) {
                rec = rec.detail(&format!("X^R_{}", f.label), f.render(&g));
            }
            report.push(rec);
            Ok(report)
        }
        Command::Theta { spec } => {
            let mut report = Report::new("theta", spec, pin_strings, seed);
            let g = match load(spec, pins)? {
                Entry::Group(g) => g,
                Entry::Algebra(_) => {
                    return Err("abstract algebras have no coordinate Theta".into())
                }
            };
            let theta = quantization_form(&g).map_err(|e| e.to_string())?;
            let sigma = curvature(&g, &theta);
            let duals = dual_forms(&g).map_err(|e| e.to_string())?;
            let nf = sigma_normal_form(&g).map_err(|e| e.to_string())?;
            let mut rec = CheckRecord::new("quantization-form", true)
                .detail("Theta", theta.render(&g))
                .detail("dTheta", sigma.render(&g))
                .detail("J", nf.j_tensor())
                .detail("kernel", nf.kernel_labels().join(", "));
            for (a, b, nu) in nf.pair_labels() {
                rec = rec.detail(&format!("darboux-pair ({a}, {b})"), format!("nu = {nu}"));
            }
            if !nf.conditions.is_empty() {
                rec = rec.detail("conditions", nf.conditions.join("; "));
            }
            for f in &duals.forms {
                rec = rec.detail(&format!("theta^L_{}", f.label), f.render(&g));
            }
            report.push(rec);
            let noether = noether_invariants(&g).map_err(|e| e.to_string())?;
            let mut rec = CheckRecord::new("noether-invariants", true);
            for (name, e) in noether {
                rec = rec.detail(&format!("F_{name}"), e.to_string());
            }
            report.push(rec);
            Ok(report)
        }
        Command::Brackets { spec } => {
            let mut report = Report::new("brackets", spec, pin_strings, seed);
            let table = match load(spec, pins)? {
                Entry::Group(g) => structure_constants(&g, true).map_err(|e| e.to_string())?,
                Entry::Algebra(a) => table_from_algebra(&a),
            };
            let mut rec = CheckRecord::new("structure-constants", true);
            let n = table.dim();
            for i in 0..n {
                for j in (i + 1)..n {
                    let mut parts = Vec::new();
                    for k in 0..n {
                        if !table.c[i][j][k].is_zero() {
                            parts.push(format!("({}) X[{}]", table.c[i][j][k], table.names[k]));
                        }
                    }
                    if !table.charge[i][j].is_zero() {
                        parts.push(format!("({}) X0", table.charge[i][j]));
                    }
                    let rhs = if parts.is_empty() {
                        "0".to_string()
                    } else {
                        parts.join(" + ")
                    };
                    rec = rec.detail(
                        &format!("[X[{}], X[{}]]", table.names[i], table.names[j]),
                        rhs,
                    );
                }
            }
            report.push(rec);
            let jac = jacobi_check(&table);
            report.push(
                CheckRecord::new("jacobi", jac.passed)
                    .with_witness(jac.witness.map(|w| format!("{w:?}"))),
            );
            Ok(report)
        }
        Command::CharSubalgebra { spec } => {
            let mut report = Report::new("char-subalgebra", spec, pin_strings, seed);
            let chars = match load(spec, pins)? {
                Entry::Group(g) => characteristic_of_group(&g).map_err(|e| e.to_string())?,
                Entry::Algebra(a) => characteristic_of_algebra(&a),
            };
            report.push(
                CheckRecord::new("characteristic-subalgebra", true)
                    .detail("basis", chars.labels().join(", "))
                    .detail("conditions", chars.conditions.join("; ")),
            );
            Ok(report)
        }
        Command::Polarize { spec, set } => {
            let mut report = Report::new("polarize", spec, pin_strings, seed);
            let (table, sigma, chars) = match load(spec, pins)? {
                Entry::Group(g) => {
                    let t = structure_constants(&g, true).map_err(|e| e.to_string())?;
                    let s = gaq::invariant_calculus::sigma_at_identity(&g)
                        .map_err(|e| e.to_string())?;
                    let c = characteristic_of_group(&g).map_err(|e| e.to_string())?;
                    (t, s, c)
                }
                Entry::Algebra(a) => {
                    let t = table_from_algebra(&a);
                    let s = t.sigma_matrix();
                    let c = characteristic_of_algebra(&a);
                    (t, s, c)
                }
            };
            let elements = parse_elements(&table, set).map_err(|e| e.to_string())?;
            let v = validate_polarization(&table, &sigma, &chars.basis, &elements);
            for (name, flag) in v.flags() {
                report.push(
                    CheckRecord::new(&format!("polarization-{name}"), flag.ok)
                        .detail("detail", flag.detail.clone()),
                );
            }
            if !v.conditions.is_empty() {
                report.push(
                    CheckRecord::new("conditions", true)
                        .detail("assumed", v.conditions.join("; ")),
                );
            }
            Ok(report)
        }
        Command::HoPolarize { spec, set } => {
            let mut report = Report::new("ho-polarize", spec, pin_strings, seed);
            let table = match load(spec, pins)? {
                Entry::Group(g) => structure_constants(&g, true).map_err(|e| e.to_string())?,
                Entry::Algebra(a) => table_from_algebra(&a),
            };
            let alg = PbwAlgebra::new(table);
            let mut elements = Vec::new();
            for part in gaq::lie_structure::split_top_level(set) {
                elements.push(alg.parse_poly(&part).map_err(|e| e.to_string())?);
            }
            let verdict = check_ho_polarization(&alg, &elements).map_err(|e| e.to_string())?;
            let mut rec = CheckRecord::new("higher-order-closure", verdict.closes);
            for r in &verdict.records {
                rec = rec.detail(
                    &format!("[P{}, P{}]", r.pair.0, r.pair.1),
                    format!("residue: {}", r.residue_rendered),
                );
            }
            if !verdict.x0_intersections.is_empty() {
                rec = rec.detail(
                    "x0_intersections",
                    format!("{:?}", verdict.x0_intersections),
                );
            }
            report.push(rec);
            if let Some(fo) = &verdict.first_order_verdict {
                report.push(
                    CheckRecord::new("vector-field-content", fo.horizontal.ok && fo.subalgebra.ok)
                        .detail("flags", {
                            fo.flags()
                                .iter()
                                .map(|(n, f)| format!("{n}={}", f.ok))
                                .collect::<Vec<_>>()
                                .join(", ")
                        }),
                );
            }
            Ok(report)
        }
        Command::AnomalyScan { spec, param } => {
            let mut report = Report::new("anomaly-scan", spec, pin_strings, seed);
            let (alg, template) = match load(spec, pins)? {
                Entry::Algebra(a) => {
                    let alg = PbwAlgebra::new(table_from_algebra(&a));
                    let t = vec![
                        alg.parse_poly("L_t").map_err(|e| e.to_string())?,
                        alg.parse_poly("L_a").map_err(|e| e.to_string())?,
                        alg.parse_poly("L_x").map_err(|e| e.to_string())?,
                        alg.parse_poly("L_c + (i/(2*m))*L_v^2")
                            .map_err(|e| e.to_string())?,
                    ];
                    (alg, t)
                }
                Entry::Group(_) => {
                    return Err(
                        "anomaly-scan runs on the abstract schrodinger-algebra template".into(),
                    )
                }
            };
            let scan = anomaly_scan(&alg, &template, param).map_err(|e| e.to_string())?;
            let mut rec = CheckRecord::new("anomaly-scan", false)
                .detail("template", "{t, a, x, c + (i/2m) v^2}")
                .detail(
                    "convention",
                    "deformation [t,c] = a + 2ik*Z with Z acting as i; k is the real Bargmann index (the literal a + 2kZ reading shifts the root to i/4, same magnitude 1/4)",
                );
            match scan {
                ScanResult::Roots(roots) => {
                    rec.status = Status::Pass;
                    for (k, r) in roots.iter().enumerate() {
                        rec = rec.detail(&format!("root[{k}]"), r.to_string());
                        if let Some(c) = r.as_const() {
                            let m2 = &c * &c.conj();
                            rec = rec
                                .detail(&format!("root[{k}]-magnitude-squared"), m2.to_string());
                        }
                    }
                }
                other => {
                    rec = rec.with_witness(Some(format!("{other:?}")));
                }
            }
            report.push(rec);
            Ok(report)
        }
        Command::Represent { spec, polarization } => {
            let mut report = Report::new("represent", spec, pin_strings, seed);
            let g = match load(spec, pins)? {
                Entry::Group(g) => g,
                Entry::Algebra(_) => return Err("representations need a coordinate group".into()),
            };
            let (ansatz, ops) = registry_scenario(&g, polarization).map_err(|e| e.to_string())?;
            let mut rec = CheckRecord::new("ansatz", true)
                .detail("prefactor", ansatz.prefactor.to_string())
                .detail("reduced_coords", ansatz.reduced_coords.join(", "));
            let residuals = apply_polarization(&g, &ops, &ansatz).map_err(|e| e.to_string())?;
            for r in &residuals {
                rec = rec.detail(
                    &format!("residual[{}]", r.operator),
                    if r.solved() {
                        "0".to_string()
                    } else {
                        r.expr.to_string()
                    },
                );
            }
            report.push(rec);
            let mut rec = CheckRecord::new("reduced-right-actions", true);
            for gen in g.chart.names() {
                match reduce_right_action(&g, &ansatz, &gen) {
                    Ok(op) => rec = rec.detail(&format!("X^R_{gen}"), op.render()),
                    Err(e) => rec = rec.detail(&format!("X^R_{gen}"), format!("not reducible: {e}")),
                }
            }
            report.push(rec);
            Ok(report)
        }
        Command::Su2Matrices { j } => {
            let mut report = Report::new("su2-matrices", "su2", pin_strings, seed);
            let jv = parse_rational(j)?;
            let rep = su2_rep_matrices(&jv).map_err(|e| e.to_string())?;
            let fmt = |m: &gaq::representations::Matrix| -> String {
                m.iter()
                    .map(|row| {
                        format!(
                            "[{}]",
                            row.iter()
                                .map(|e| e.to_string())
                                .collect::<Vec<_>>()
                                .join(", ")
                        )
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            report.push(
                CheckRecord::new("spin-matrices", true)
                    .detail("dim", rep.dim as u64)
                    .detail("J0", fmt(&rep.j0))
                    .detail("J+", fmt(&rep.j_plus))
                    .detail("J-", fmt(&rep.j_minus))
                    .detail("casimir", fmt(&rep.casimir))
                    .detail(
                        "weights",
                        rep.weights
                            .iter()
                            .map(|w| w.to_string())
                            .collect::<Vec<_>>()
                            .join(", "),
                    )
                    .detail("note", rep.weight_note.clone()),
            );
            let adj = gaq::representations::check_adjointness(&rep);
            report.push(
                CheckRecord::new("adjointness", adj.is_ok())
                    .with_witness(adj.err().map(|e| e.to_string())),
            );
            Ok(report)
        }
        Command::Hermite { n } => {
            let mut report = Report::new("hermite", "harmonic-oscillator", pin_strings, seed);
            let one = BigRational::from_integer(1.into());
            let hbar = pins.get("hbar").cloned().unwrap_or_else(|| one.clone());
            let m = pins.get("m").cloned().unwrap_or_else(|| one.clone());
            let omega = pins.get("omega").cloned().unwrap_or(one);
            let xs: Vec<f64> = (0..41).map(|k| -4.0 + 0.2 * k as f64).collect();
            let ts = vec![0.0, 0.5];
            let rep = hermite_residual_check(*n, &hbar, &m, &omega, &xs, &ts)
                .map_err(|e| e.to_string())?;
            let ok = rep.max_residual < gaq::scenarios::HERMITE_TOL;
            report.push(
                CheckRecord::new(&format!("hermite-n{n}"), ok)
                    .detail("max_residual", rep.max_residual)
                    .detail("energy", rep.energy)
                    .detail("expected_energy", rep.expected_energy),
            );
            Ok(report)
        }
        Command::ReplayPaper => {
            let mut report = Report::new("replay-paper", "registry", pin_strings, seed);
            for check in gaq::scenarios::replay_paper(seed) {
                report.push(check);
            }
            Ok(report)
        }
    }
}
