use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use accordion::complex::facets;
use accordion::io::{
    dissection_from_json, facet_from_json, facet_to_json, nest_from_json,
    nest_to_json, DissectionJson, PhiInput, PhiOutput, PsiInput, PsiOutput,
};
use accordion::oracle::verify;
use accordion::render::{render, RenderSpec};
use accordion::serpent::enumerate_serpent_nests;
use accordion::{bijection, Error};

#[derive(Parser)]
#[command(name = "accordion", about = "Accordion complexes of polygon dissections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct IoArgs {
    /// Input file, or "-" for stdin
    #[arg(long, default_value = "-")]
    input: String,
    /// Output file, or "-" for stdout
    #[arg(long, default_value = "-")]
    output: String,
}

#[derive(Subcommand)]
enum Command {
    /// List the facets of a dissection's accordion complex
    Facets(IoArgs),
    /// List the serpent nests of a dissection
    Nests(IoArgs),
    /// Map a facet to its serpent nest
    Phi {
        #[command(flatten)]
        io: IoArgs,
        /// Include the recursion trace in the output
        #[arg(long)]
        trace: bool,
    },
    /// Map a serpent nest to its facet
    Psi {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        trace: bool,
    },
    /// Exhaustively check facet/nest counts and round trips up to a size
    Verify {
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        #[arg(long, default_value = "-")]
        output: String,
    },
    /// Render a dissection (optionally with a facet or nest) as SVG
    Render {
        #[command(flatten)]
        io: IoArgs,
        /// Write the SVG here instead of --output
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

fn read_input(path: &str) -> Result<String, Error> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf)?;
        Ok(buf)
    } else {
        Ok(std::fs::read_to_string(path)?)
    }
}

fn write_output(path: &str, text: &str) -> Result<(), Error> {
    if path == "-" {
        std::io::stdout().write_all(text.as_bytes())?;
        Ok(())
    } else {
        Ok(std::fs::write(path, text)?)
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, Error> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("malformed input: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Facets(io) => {
            let d = dissection_from_json(&parse::<DissectionJson>(&read_input(&io.input)?)?)?;
            let out: Vec<_> = facets(&d).iter().map(facet_to_json).collect();
            write_output(&io.output, &format!("{}\n", serde_json::to_string(&out)?))?;
        }
        Command::Nests(io) => {
            let d = dissection_from_json(&parse::<DissectionJson>(&read_input(&io.input)?)?)?;
            let out: Vec<_> = enumerate_serpent_nests(&d)?.iter().map(nest_to_json).collect();
            write_output(&io.output, &format!("{}\n", serde_json::to_string(&out)?))?;
        }
        Command::Phi { io, trace } => {
            let input: PhiInput = parse(&read_input(&io.input)?)?;
            let d = dissection_from_json(&input.dissection)?;
            let facet = facet_from_json(&input.facet, &d)?;
            let (nest, tr) = bijection::phi_with_trace(&d, &facet)?;
            let out = PhiOutput {
                nest: nest_to_json(&nest),
                trace: trace.then_some(tr),
            };
            write_output(&io.output, &format!("{}\n", serde_json::to_string(&out)?))?;
        }
        Command::Psi { io, trace } => {
            let input: PsiInput = parse(&read_input(&io.input)?)?;
            let d = dissection_from_json(&input.dissection)?;
            let nest = nest_from_json(&input.nest, &d)?;
            let (facet, tr) = bijection::psi_with_trace(&d, &nest)?;
            let out = PsiOutput {
                facet: facet_to_json(&facet),
                trace: trace.then_some(tr),
            };
            write_output(&io.output, &format!("{}\n", serde_json::to_string(&out)?))?;
        }
        Command::Verify { max_n, output } => {
            let report = verify(max_n);
            eprintln!("{}", report.summary());
            write_output(&output, &format!("{}\n", serde_json::to_string(&report)?))?;
            if !report.ok() {
                return Ok(ExitCode::from(2));
            }
        }
        Command::Render { io, svg } => {
            let text = read_input(&io.input)?;
            // accept a bare dissection or an envelope carrying a facet or nest
            let value: serde_json::Value = parse(&text)?;
            let (d, facet, nest) = if value.get("dissection").is_some() {
                if value.get("nest").is_some() {
                    let input: PsiInput = parse(&text)?;
                    let d = dissection_from_json(&input.dissection)?;
                    let nest = nest_from_json(&input.nest, &d)?;
                    (d, None, Some(nest))
                } else {
                    let input: PhiInput = parse(&text)?;
                    let d = dissection_from_json(&input.dissection)?;
                    let facet = facet_from_json(&input.facet, &d)?;
                    (d, Some(facet), None)
                }
            } else {
                (dissection_from_json(&parse::<DissectionJson>(&text)?)?, None, None)
            };
            let image = render(&d, facet.as_ref(), nest.as_ref(), &RenderSpec::default());
            match svg {
                Some(path) => std::fs::write(path, image)?,
                None => write_output(&io.output, &image)?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
