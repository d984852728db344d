//! `powmon`: command-line surface over the power-monoid toolkit.
//!
//! Every subcommand maps to exactly one library operation and prints its
//! result in the selected format (plain, json, or csv). Exit codes: 0 on
//! success, 1 on a domain error (bad input, exhausted budget), 2 on a
//! usage error. Output is deterministic for a fixed argument vector and
//! seed, at any thread count.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use powmon_core::budget::Budget;
use powmon_core::density::{
    count_exact, density_limit_pfin, growth_constant_bounds, sample_decomposable, DensityReport,
    DensityVariant,
};
use powmon_core::factor::{
    catenary_degree, divisors, factorizations, is_atom, length_set, omega_lower_bound,
    prime_counterexample, search_length_set, strong_atom_refuter, Ambient, AtomCheck,
    PrimeOutcome, SearchBounds,
};
use powmon_core::set::{set_universe_bound, FiniteSet, DEFAULT_UNIVERSE_BOUND};
use powmon_core::spectrum::{
    dcs_contains, dcs_generator, dcs_of, mdcs, mdcs_fingerprint, noncancellative_witnesses,
    DcsDescriptor,
};
use powmon_core::structure::{
    cancellation_counterexample, grothendieck_class, grothendieck_witness, structural_form,
    GrothClass, GrothVariant,
};
use powmon_core::{Error, Submonoid, DEFAULT_BUDGET};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Parser)]
#[command(
    name = "powmon",
    version,
    about = "Exact computation in power monoids of numerical monoids",
    long_about = None
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Plain)]
    format: Format,

    /// Node budget for enumeration searches (env: POWMON_BUDGET).
    #[arg(long, global = true, env = "POWMON_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,

    /// Worker threads; 0 keeps the library default. Output is identical at
    /// any thread count.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    /// Largest representable set element.
    #[arg(long, global = true, default_value_t = DEFAULT_UNIVERSE_BOUND)]
    universe: u32,

    #[command(subcommand)]
    command: Command,
}

/// Ambient selection: restricted P_fin,0(S) by default, full P_fin(S)
/// with --unrestricted.
#[derive(Args, Clone)]
struct AmbientArgs {
    /// Ambient numerical monoid, e.g. "<2,5>".
    #[arg(long, default_value = "<1>")]
    monoid: String,

    /// Work in P_fin(S) instead of P_fin,0(S).
    #[arg(long)]
    unrestricted: bool,
}

impl AmbientArgs {
    fn build(&self) -> Result<Ambient, Error> {
        let s: Submonoid = self.monoid.parse()?;
        Ok(if self.unrestricted {
            Ambient::Unrestricted(s)
        } else {
            Ambient::Restricted(s)
        })
    }
}

/// Descriptor selection for spectrum commands: a generating set, a monoid
/// (meaning P_fin,0(S)), or explicit components.
#[derive(Args, Clone)]
struct DescriptorArgs {
    /// Name ⟦A⟧ for this set.
    #[arg(long, conflicts_with_all = ["monoid", "s_monoid", "t_monoid"])]
    set: Option<String>,

    /// Name P_fin,0(S) for this monoid.
    #[arg(long)]
    monoid: Option<String>,

    /// Explicit S component (with --t-monoid, optional --dilation).
    #[arg(long, requires = "t_monoid", conflicts_with = "monoid")]
    s_monoid: Option<String>,

    /// Explicit T component.
    #[arg(long, requires = "s_monoid")]
    t_monoid: Option<String>,

    /// Dilation d of the descriptor (d, S, T).
    #[arg(long, default_value_t = 1)]
    dilation: u32,
}

impl DescriptorArgs {
    fn build(&self) -> Result<DcsDescriptor, Error> {
        if let Some(set) = &self.set {
            return dcs_of(&set.parse()?);
        }
        if let Some(monoid) = &self.monoid {
            return DcsDescriptor::restricted_power_monoid(&monoid.parse()?);
        }
        if let (Some(s), Some(t)) = (&self.s_monoid, &self.t_monoid) {
            return DcsDescriptor::new(self.dilation, s.parse()?, t.parse()?);
        }
        Err(Error::Precondition(
            "name a descriptor with --set, --monoid, or --s-monoid/--t-monoid".into(),
        ))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sumset A + B of two set literals.
    Sumset { a: String, b: String },
    /// n-fold sumset nA.
    Nfold { a: String, n: u32 },
    /// Reversion rev(A) = max(A) − A.
    Rev { a: String },
    /// Set of distances Δ(A).
    Delta { a: String },
    /// Atoms, Frobenius number, and genus of ⟨generators⟩.
    MonoidInfo { monoid: String },
    /// The monoid ⟨A⟩ spanned by a set.
    Span { a: String },
    /// Irreducibility of A, with a certificate when decomposable.
    Atom {
        a: String,
        #[command(flatten)]
        ambient: AmbientArgs,
    },
    /// All divisors of A and the count τ(A).
    Divisors {
        a: String,
        #[command(flatten)]
        ambient: AmbientArgs,
    },
    /// The complete factorization set Z(A).
    Factorize {
        a: String,
        #[command(flatten)]
        ambient: AmbientArgs,
    },
    /// Set of lengths L(A) and its distance set.
    Lengths {
        a: String,
        #[command(flatten)]
        ambient: AmbientArgs,
    },
    /// Catenary degree c(A).
    Catenary {
        a: String,
        #[command(flatten)]
        ambient: AmbientArgs,
    },
    /// Witness that A is not prime in P_fin(S).
    PrimeRefute {
        a: String,
        #[arg(long, default_value = "<1>")]
        monoid: String,
    },
    /// Least N with two distinct factorizations of NA.
    StrongAtomRefute {
        a: String,
        #[command(flatten)]
        ambient: AmbientArgs,
        /// Largest N to try.
        #[arg(long, default_value_t = 16)]
        cap: u32,
    },
    /// Certified lower bound ω(P_fin,0(S), {0,a}) ≥ n + 2.
    OmegaBound {
        #[arg(long, default_value = "<1>")]
        monoid: String,
        #[arg(short, long)]
        element: u32,
        #[arg(short, long)]
        n: u32,
    },
    /// The divisor-closed submonoid ⟦A⟧ as a triple (d, S, T).
    Dcs { a: String },
    /// Maximal divisor-closed submonoids of a descriptor.
    Mdcs {
        #[command(flatten)]
        descriptor: DescriptorArgs,
    },
    /// MDCS-count tree of a descriptor.
    Fingerprint {
        #[command(flatten)]
        descriptor: DescriptorArgs,
        #[arg(long, default_value_t = 2)]
        depth: u32,
    },
    /// A set A with ⟦A⟧ equal to the descriptor.
    GenDcs {
        #[command(flatten)]
        descriptor: DescriptorArgs,
    },
    /// Verified torsion/transfer counterexample families in a descriptor.
    Witnesses {
        #[command(flatten)]
        descriptor: DescriptorArgs,
        /// Index n of the family (defaults to the least valid one).
        #[arg(long)]
        n: Option<u32>,
    },
    /// Exhaustive atom/decomposable counts at max ≤ N.
    DensityExact {
        #[arg(short, long)]
        n: u32,
        /// Universe: restricted, all-subsets, or unrestricted.
        #[arg(long, default_value = "restricted")]
        variant: String,
        #[arg(long, default_value = "<1>")]
        monoid: String,
        /// Raise the exhaustive cap (defaults: 22, unrestricted 16).
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Monte Carlo estimate of the Dec(N) fraction.
    DensitySample {
        #[arg(short, long)]
        n: u32,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Exact limiting atom density of P_fin(S).
    DensityLimit {
        #[arg(long, default_value = "<1>")]
        monoid: String,
    },
    /// Exact |Dec(N)| counts with the empirical growth slopes.
    Growth {
        #[arg(long, default_value_t = 14)]
        n_max: u32,
        #[arg(long)]
        cap: Option<u32>,
    },
    /// Search for a set with the given set of lengths.
    FindLengthset {
        /// Comma-separated lengths, all ≥ 2, e.g. "2,3".
        #[arg(long)]
        lengths: String,
        #[command(flatten)]
        ambient: AmbientArgs,
        #[arg(long, default_value_t = 16)]
        max_element: u32,
        #[arg(long, default_value_t = 8)]
        max_cardinality: usize,
    },
    /// Structural threshold n*(A) and the stable form of nA.
    Nstar { a: String },
    /// Witness (n, B) with A + B = (n+1)A and B ⊊ nA.
    CancelRefute { a: String },
    /// Grothendieck class of (A, B); with --against, the witness check.
    GrothClass {
        a: String,
        b: String,
        /// Use the restricted power monoid (class in Z instead of Z ⊕ Z).
        #[arg(long)]
        restricted: bool,
        /// Second pair "C D" to compare classes and search a witness.
        #[arg(long, num_args = 2, value_names = ["C", "D"])]
        against: Option<Vec<String>>,
        #[arg(long, default_value = "<1>")]
        monoid: String,
    },
}

/// A command's result, ready for any output format.
struct Rendered {
    plain: String,
    json: Value,
    /// CSV body; key,value flattening of the JSON object when absent.
    csv: Option<String>,
}

impl Rendered {
    fn of(plain: impl Into<String>, json: Value) -> Self {
        Rendered {
            plain: plain.into(),
            json,
            csv: None,
        }
    }

    fn emit(self, format: Format) {
        match format {
            Format::Plain => println!("{}", self.plain),
            Format::Json => println!("{}", self.json),
            Format::Csv => match self.csv {
                Some(csv) => println!("{csv}"),
                None => {
                    println!("key,value");
                    if let Value::Object(map) = &self.json {
                        for (k, v) in map {
                            println!("{k},{}", csv_cell(v));
                        }
                    } else {
                        println!("value,{}", csv_cell(&self.json));
                    }
                }
            },
        }
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if raw.contains(',') || raw.contains('"') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn parse_set(s: &str) -> Result<FiniteSet, Error> {
    s.parse()
}

fn density_csv(report: &DensityReport) -> String {
    format!("{}\n{}", DensityReport::CSV_HEADER, report.csv_row())
}

fn run(cli: Cli) -> Result<Rendered, Error> {
    let budget = Budget::new(cli.budget);
    Ok(match cli.command {
        Command::Sumset { a, b } => {
            let s = parse_set(&a)?.sumset(&parse_set(&b)?)?;
            Rendered::of(s.to_string(), json!({ "result": s }))
        }
        Command::Nfold { a, n } => {
            let s = parse_set(&a)?.k_fold(n)?;
            Rendered::of(s.to_string(), json!({ "result": s }))
        }
        Command::Rev { a } => {
            let s = parse_set(&a)?.reversion();
            Rendered::of(s.to_string(), json!({ "result": s }))
        }
        Command::Delta { a } => {
            let d = parse_set(&a)?.delta_set();
            let plain = format!(
                "{{{}}}",
                d.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
            );
            Rendered::of(plain, json!({ "result": d }))
        }
        Command::MonoidInfo { monoid } => {
            let s: Submonoid = monoid.parse()?;
            let plain = format!(
                "{s}: d={}, atoms={:?}, frobenius={}, genus={}, m={}",
                s.scale(),
                s.atoms(),
                s.frobenius(),
                s.genus(),
                s.reduced().m_invariant()?,
            );
            Rendered::of(plain, serde_json::to_value(&s).expect("serializable"))
        }
        Command::Span { a } => {
            let s = Submonoid::span(&parse_set(&a)?)?;
            Rendered::of(s.to_string(), serde_json::to_value(&s).expect("serializable"))
        }
        Command::Atom { a, ambient } => {
            let check = is_atom(&parse_set(&a)?, &ambient.build()?, &budget)?;
            match check {
                AtomCheck::Atom => Rendered::of("atom", json!({ "atom": true })),
                AtomCheck::Decomposable { left, right } => Rendered::of(
                    format!("not an atom: {left} + {right}"),
                    json!({ "atom": false, "witness": { "left": left, "right": right } }),
                ),
            }
        }
        Command::Divisors { a, ambient } => {
            let divs = divisors(&parse_set(&a)?, &ambient.build()?, &budget)?;
            let plain = format!(
                "tau = {}\n{}",
                divs.len(),
                divs.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
            );
            Rendered::of(plain, json!({ "tau": divs.len(), "divisors": divs }))
        }
        Command::Factorize { a, ambient } => {
            let zs = factorizations(&parse_set(&a)?, &ambient.build()?, &budget)?;
            let plain = zs
                .iter()
                .map(|z| z.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            let parts: Vec<&Vec<FiniteSet>> = zs.iter().map(|z| &z.parts).collect();
            Rendered::of(
                format!("{} factorizations\n{plain}", zs.len()),
                json!({ "count": zs.len(), "factorizations": parts }),
            )
        }
        Command::Lengths { a, ambient } => {
            let ls = length_set(&parse_set(&a)?, &ambient.build()?, &budget)?;
            Rendered::of(
                format!("L = {:?}, delta = {:?}", ls.lengths, ls.delta),
                serde_json::to_value(&ls).expect("serializable"),
            )
        }
        Command::Catenary { a, ambient } => {
            let c = catenary_degree(&parse_set(&a)?, &ambient.build()?, &budget)?;
            Rendered::of(c.to_string(), json!({ "catenary": c }))
        }
        Command::PrimeRefute { a, monoid } => {
            let outcome = prime_counterexample(&parse_set(&a)?, &monoid.parse()?)?;
            match outcome {
                PrimeOutcome::Prime => Rendered::of("prime", json!({ "prime": true })),
                PrimeOutcome::NotPrime { left, right, quotient } => Rendered::of(
                    format!("not prime: A | {left} + {right}, A divides neither factor"),
                    json!({
                        "prime": false,
                        "witness": { "left": left, "right": right, "quotient": quotient }
                    }),
                ),
            }
        }
        Command::StrongAtomRefute { a, ambient, cap } => {
            let r = strong_atom_refuter(&parse_set(&a)?, &ambient.build()?, &budget, cap)?;
            Rendered::of(
                format!("N = {}\n{}\n{}", r.n, r.first, r.second),
                serde_json::to_value(&r).expect("serializable"),
            )
        }
        Command::OmegaBound { monoid, element, n } => {
            let w = omega_lower_bound(&monoid.parse()?, element, n)?;
            Rendered::of(
                format!(
                    "omega >= {} (witness sum of {} atoms, {} subsums refuted)",
                    w.bound,
                    w.n + 2,
                    w.subsums_checked
                ),
                serde_json::to_value(&w).expect("serializable"),
            )
        }
        Command::Dcs { a } => {
            let d = dcs_of(&parse_set(&a)?)?;
            Rendered::of(d.to_string(), serde_json::to_value(&d).expect("serializable"))
        }
        Command::Mdcs { descriptor } => {
            let children = mdcs(&descriptor.build()?)?;
            let plain = children
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("\n");
            Rendered::of(
                format!("{} maximal divisor-closed submonoids\n{plain}", children.len()),
                json!({ "count": children.len(), "children": children }),
            )
        }
        Command::Fingerprint { descriptor, depth } => {
            let fp = mdcs_fingerprint(&descriptor.build()?, depth, &budget)?;
            Rendered::of(
                format!("root {} children {:?}", fp.count, fp.child_counts()),
                serde_json::to_value(&fp).expect("serializable"),
            )
        }
        Command::GenDcs { descriptor } => {
            let d = descriptor.build()?;
            let a = dcs_generator(&d, &budget)?;
            debug_assert!(dcs_contains(&d, &a)?);
            Rendered::of(a.to_string(), json!({ "generator": a }))
        }
        Command::Witnesses { descriptor, n } => {
            let w = noncancellative_witnesses(&descriptor.build()?, n)?;
            Rendered::of(
                format!(
                    "n = {} (threshold {}): F = B+C = B+D+D and (B∖{{2dn}})² = B² verified\nB = {}\nC = {}\nD = {}\nF = {}",
                    w.n, w.n_star, w.b, w.c, w.d, w.f
                ),
                serde_json::to_value(&w).expect("serializable"),
            )
        }
        Command::DensityExact { n, variant, monoid, cap } => {
            let variant = match variant.as_str() {
                "restricted" => DensityVariant::Restricted,
                "all-subsets" => DensityVariant::AllSubsets,
                "unrestricted" => DensityVariant::Unrestricted(monoid.parse()?),
                other => {
                    return Err(Error::Parse(format!(
                        "unknown variant `{other}` (restricted, all-subsets, unrestricted)"
                    )))
                }
            };
            let report = count_exact(n, &variant, cap, &budget)?;
            let plain = format!(
                "N={} {}: total {}, atoms {}, decomposables {}, identity {}",
                report.n, report.variant, report.total, report.atoms, report.decomposables,
                report.identity_count
            );
            Rendered {
                plain,
                csv: Some(density_csv(&report)),
                json: serde_json::to_value(&report).expect("serializable"),
            }
        }
        Command::DensitySample { n, trials, seed } => {
            let report = sample_decomposable(n, trials, seed)?;
            let plain = format!(
                "N={} Dec fraction ≈ {:.6} ± {:.6} ({} trials, seed {})",
                n,
                report.estimate.unwrap_or(0.0),
                report.stderr.unwrap_or(0.0),
                trials,
                seed
            );
            Rendered {
                plain,
                csv: Some(density_csv(&report)),
                json: serde_json::to_value(&report).expect("serializable"),
            }
        }
        Command::DensityLimit { monoid } => {
            let s: Submonoid = monoid.parse()?;
            let limit = density_limit_pfin(&s)?;
            Rendered::of(
                format!("{limit}"),
                json!({
                    "monoid": s,
                    "numerator": limit.numer(),
                    "denominator": limit.denom(),
                    "value": *limit.numer() as f64 / *limit.denom() as f64
                }),
            )
        }
        Command::Growth { n_max, cap } => {
            let report = growth_constant_bounds(n_max, cap, &budget)?;
            let mut csv = String::from("N,dec_count,slope,proven_lower,proven_upper");
            let mut plain = String::from("N  |Dec(N)|  log2/N   (proven bracket [1.754, 2))");
            for row in &report.rows {
                let slope = row.slope.map(|s| format!("{s:.4}")).unwrap_or_default();
                csv.push_str(&format!(
                    "\n{},{},{},{},{}",
                    row.n, row.dec_count, slope, report.proven_lower, report.proven_upper
                ));
                plain.push_str(&format!("\n{:<3}{:<10}{}", row.n, row.dec_count, slope));
            }
            Rendered {
                plain,
                csv: Some(csv),
                json: serde_json::to_value(&report).expect("serializable"),
            }
        }
        Command::FindLengthset {
            lengths,
            ambient,
            max_element,
            max_cardinality,
        } => {
            let target: Vec<u32> = lengths
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad length `{p}`")))
                })
                .collect::<Result<_, _>>()?;
            let bounds = SearchBounds {
                max_element,
                max_cardinality,
            };
            match search_length_set(&target, &ambient.build()?, bounds, &budget)? {
                Some(a) => Rendered::of(a.to_string(), json!({ "found": true, "set": a })),
                None => Rendered::of(
                    "not found within bounds (inconclusive)",
                    json!({ "found": false }),
                ),
            }
        }
        Command::Nstar { a } => {
            let form = structural_form(&parse_set(&a)?)?;
            Rendered::of(
                format!(
                    "n* = {} (d = {}, S = {}, T = {})",
                    form.n_star, form.scale, form.s, form.t
                ),
                serde_json::to_value(&form).expect("serializable"),
            )
        }
        Command::CancelRefute { a } => {
            let set = parse_set(&a)?;
            let (n, b) = cancellation_counterexample(&set)?;
            Rendered::of(
                format!("n = {n}, B = {b} (A + B = (n+1)A, B ⊊ nA)"),
                json!({ "n": n, "b": b }),
            )
        }
        Command::GrothClass {
            a,
            b,
            restricted,
            against,
            monoid,
        } => {
            let variant = if restricted {
                GrothVariant::Restricted
            } else {
                GrothVariant::Unrestricted
            };
            let (a, b) = (parse_set(&a)?, parse_set(&b)?);
            let class = grothendieck_class(&a, &b, variant)?;
            let class_json = match class {
                GrothClass::Unrestricted { max_diff, min_diff } => json!([max_diff, min_diff]),
                GrothClass::Restricted { max_diff } => json!(max_diff),
            };
            let plain_class = match class {
                GrothClass::Unrestricted { max_diff, min_diff } => {
                    format!("({max_diff}, {min_diff})")
                }
                GrothClass::Restricted { max_diff } => format!("{max_diff}"),
            };
            match against {
                None => Rendered::of(plain_class, json!({ "class": class_json })),
                Some(cd) => {
                    let (c, d) = (parse_set(&cd[0])?, parse_set(&cd[1])?);
                    let s: Submonoid = monoid.parse()?;
                    let witness = grothendieck_witness(&a, &b, &c, &d, &s, variant)?;
                    match witness {
                        Some(e) => Rendered::of(
                            format!("{plain_class}; equivalent, witness E = {e}"),
                            json!({ "class": class_json, "equivalent": true, "witness": e }),
                        ),
                        None => Rendered::of(
                            format!("{plain_class}; not equivalent"),
                            json!({ "class": class_json, "equivalent": false }),
                        ),
                    }
                }
            }
        }
    })
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // deterministic reductions make the thread count invisible in output
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    set_universe_bound(cli.universe);
    let format = cli.format;
    match run(cli) {
        Ok(rendered) => {
            rendered.emit(format);
            std::process::ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            std::process::ExitCode::from(1)
        }
    }
}
