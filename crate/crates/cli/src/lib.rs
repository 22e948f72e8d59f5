//! `riffle` command line. `run` takes the writers explicitly so tests can drive it
//! in-process.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use riffle_core::affine::{affine2_samples, affine_measure, AffineMethod};
use riffle_core::conjecture::reciprocity_pair;
use riffle_core::measure::PermMeasure;
use riffle_core::patience::{
    foata_decompose, involution_firstpile_poly, patience_play, phi_bijection, render_poly,
    MultisetWord, TieRule,
};
use riffle_core::polyfactor::class_measure;
use riffle_core::shuffle::{cut_measure, gsr_samples, riffle_measure, shuffle_then_cut_measure, tv_riffle_table};
use riffle_core::tsv::{class_measure_to_tsv, measure_to_tsv, table_to_tsv};
use riffle_core::verify::{run_suite, Suite};
use riffle_core::{Error, Limits};

pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "riffle", version, about = "Exact riffle, cut and affine shuffle measures")]
struct Cli {
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Largest n enumerated element by element.
    #[arg(long, global = true, default_value_t = Limits::default().enumeration_cap)]
    enumeration_cap: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print a measure on S_n as TSV.
    Measure {
        #[arg(long, value_enum)]
        law: Law,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Lump over conjugacy classes.
        #[arg(long)]
        by_class: bool,
        /// Definition used for affine shuffles.
        #[arg(long, default_value = "partitions")]
        method: AffineMethod,
        /// Skip comparing affine results against the Ramanujan-sum definition.
        #[arg(long)]
        no_crosscheck: bool,
    },
    /// Total variation to uniform after m = 1.. riffle shuffles.
    Tv {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        max_shuffles: usize,
        /// Follow each run of shuffles by a cut.
        #[arg(long)]
        with_cut: bool,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, default_value = "all")]
        suite: Suite,
        #[arg(long, default_value_t = 5)]
        max_n: usize,
        /// Machine-readable rows instead of the text report.
        #[arg(long)]
        tsv: bool,
    },
    /// Play patience on a word, or tabulate first piles over involutions.
    Patience {
        #[arg(long, required_unless_present = "involutions")]
        word: Option<String>,
        #[arg(long, default_value = "forbidden")]
        ties: TieRule,
        /// Also print the cycle factorization and the records-to-cycles image.
        #[arg(long)]
        cycles: bool,
        /// Σ x^{first pile} over fixed-point-free involutions of S_{2N}.
        #[arg(long, conflicts_with = "word")]
        involutions: Option<usize>,
    },
    /// Draw permutations, one per line.
    Sample {
        #[arg(long, value_enum)]
        law: SampleLaw,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Both sides of the modular reciprocity count.
    Reciprocity {
        #[arg(long, allow_negative_numbers = true)]
        m: i64,
        #[arg(long)]
        x: usize,
        #[arg(long)]
        y: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Law {
    Riffle,
    Cut,
    RiffleCut,
    CutRiffle,
    Affine,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SampleLaw {
    Gsr,
    Affine2,
}

enum Failure {
    Core(Error),
    Verify,
    Crosscheck(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

/// Parses `args` (program name first), runs the command, returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if let Some(t) = cli.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let limits = Limits::with_enumeration_cap(cli.enumeration_cap);
    match execute(cli.command, &limits, out) {
        Ok(()) => 0,
        Err(Failure::Verify) => EXIT_VERIFY_FAILED,
        Err(Failure::Crosscheck(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_VERIFY_FAILED
        }
        Err(Failure::Core(e)) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_cap_violation() {
                let _ = writeln!(err, "raise --enumeration-cap or choose smaller parameters");
                EXIT_CAP
            } else {
                EXIT_USAGE
            }
        }
    }
}

fn execute(command: Command, limits: &Limits, out: &mut dyn Write) -> Result<(), Failure> {
    let text = match command {
        Command::Measure {
            law,
            n,
            k,
            by_class,
            method,
            no_crosscheck,
        } => {
            let m = build_measure(law, n, k, method, !no_crosscheck, limits)?;
            if by_class {
                class_measure_to_tsv(&class_measure(&m)?)
            } else {
                measure_to_tsv(&m)
            }
        }
        Command::Tv {
            n,
            k,
            max_shuffles,
            with_cut,
        } => table_to_tsv(&tv_riffle_table(n, k, max_shuffles, with_cut)?),
        Command::Verify { suite, max_n, tsv } => {
            let report = run_suite(suite, max_n, limits)?;
            let text = if tsv { report.to_tsv() } else { report.to_string() };
            write_out(out, &text)?;
            return if report.ok() { Ok(()) } else { Err(Failure::Verify) };
        }
        Command::Patience {
            word,
            ties,
            cycles,
            involutions,
        } => {
            if let Some(n) = involutions {
                format!("{}\n", render_poly(&involution_firstpile_poly(n)?))
            } else {
                let (w, alphabet) = MultisetWord::parse(word.as_deref().unwrap_or_default())?;
                let piles = patience_play(&w, ties);
                let mut text = piles.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
                text.push('\n');
                if cycles {
                    text.push_str(&format!("cycles\t{}\n", foata_decompose(&w).render(alphabet)));
                    text.push_str(&format!("phi\t{}\n", phi_bijection(&w).render(alphabet)));
                }
                text
            }
        }
        Command::Sample {
            law,
            n,
            k,
            count,
            seed,
        } => {
            let draws = match law {
                SampleLaw::Gsr => gsr_samples(n, k, count, seed)?,
                SampleLaw::Affine2 => affine2_samples(n, count, seed)?,
            };
            draws.iter().map(|w| format!("{w}\n")).collect()
        }
        Command::Reciprocity { m, x, y } => {
            let (a, b) = reciprocity_pair(m, x, y);
            format!("{a}\t{b}\n")
        }
    };
    write_out(out, &text)
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::Core(Error::InvalidArgument(format!("write failed: {e}"))))
}

fn build_measure(
    law: Law,
    n: usize,
    k: usize,
    method: AffineMethod,
    crosscheck: bool,
    limits: &Limits,
) -> Result<PermMeasure, Failure> {
    Ok(match law {
        Law::Riffle => riffle_measure(n, k, limits)?,
        Law::Cut => cut_measure(n)?,
        Law::RiffleCut => shuffle_then_cut_measure(n, k, limits)?,
        Law::CutRiffle => riffle_measure(n, k, limits)?.convolve(&cut_measure(n)?)?,
        Law::Affine => {
            let m = affine_measure(n, k, method, limits)?;
            if crosscheck && method != AffineMethod::Ramanujan {
                let other = affine_measure(n, k, AffineMethod::Ramanujan, limits)?;
                if other != m {
                    return Err(Failure::Crosscheck(format!(
                        "affine measure by {method} disagrees with the Ramanujan-sum definition"
                    )));
                }
            }
            m
        }
    })
}
