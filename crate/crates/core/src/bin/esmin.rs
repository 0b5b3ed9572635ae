use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use esmin::behavior::decide_bisim;
use esmin::folding::{
    check_abstraction_hom, check_folding, check_folding_aes, check_folding_pes, check_morphism, join_foldings, minimize, quotient, EventMap,
    MinClass,
};
use esmin::io::{export_configs_dot, parse_eq, parse_es, parse_map, serialize_eq, serialize_es, serialize_map};
use esmin::models::{recognize_aes, recognize_pes, validate_model, Model};
use esmin::poset::{histories, EventStructure};
use esmin::report::CheckReport;
use esmin::unfold::canonical_pes;
use esmin::{Error, Result};

#[derive(Parser)]
#[command(name = "esmin", version, about = "Event structures: configurations, foldings, unfoldings and minimal quotients")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the axioms of a structure's class.
    Validate { file: PathBuf },
    /// List the configurations, or print their Hasse diagram.
    Configs {
        file: PathBuf,
        #[arg(long)]
        dot: bool,
    },
    /// List the histories of every event.
    Histories { file: PathBuf },
    /// Write the canonical PES and print its folding onto the input.
    Unfold {
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Decide whether a map is a morphism.
    CheckMorphism { src: PathBuf, dst: PathBuf, map: PathBuf },
    /// Decide whether a map is a folding.
    CheckFolding { src: PathBuf, dst: PathBuf, map: PathBuf },
    /// Decide whether a map between PESs is an abstraction homomorphism.
    CheckAbstraction { src: PathBuf, dst: PathBuf, map: PathBuf },
    /// Write the quotient by an equivalence and print the quotient map.
    Quotient {
        src: PathBuf,
        eq: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Join two foldings with a common source.
    Join {
        src: PathBuf,
        map1: PathBuf,
        dst1: PathBuf,
        map2: PathBuf,
        dst2: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compute the maximal folding equivalences within a class.
    Minimize {
        file: PathBuf,
        #[arg(long)]
        class: MinClass,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide (hereditary) history-preserving bisimilarity.
    Bisim {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(long, conflicts_with = "hhp")]
        hp: bool,
        #[arg(long)]
        hhp: bool,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load(path: &Path) -> Result<Model> {
    parse_es(&read(path)?)
}

fn load_map(path: &Path, src: &Model, dst: &Model) -> Result<EventMap> {
    parse_map(&read(path)?, src.ids(), dst.ids())
}

fn write(path: &Path, text: &str) -> Result<()> {
    Ok(fs::write(path, text)?)
}

/// The most specific class the structure can be written in.
fn narrowest(es: EventStructure) -> Model {
    if let Some(p) = recognize_pes(&es) {
        Model::Pes(p)
    } else if let Some(a) = recognize_aes(&es) {
        Model::Aes(a)
    } else {
        Model::Poset(es)
    }
}

fn verdict(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn print_report(name: &str, r: &CheckReport) {
    print!("{name}: {r}");
}

fn folding_verdict(src: &EventStructure, dst: &EventStructure, f: &EventMap) -> Result<CheckReport> {
    match check_folding(src, dst, f) {
        Err(Error::NotAMorphism(r)) => {
            print_report("morphism", &r);
            let mut not = CheckReport::default();
            not.push("morphism", "the map is not a morphism");
            Ok(not)
        }
        other => other,
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Validate { file } => {
            let m = load(&file)?;
            let r = validate_model(&m);
            print!("{r}");
            Ok(verdict(r.is_valid()))
        }
        Command::Configs { file, dot } => {
            let es = load(&file)?.embedding(false)?;
            if dot {
                print!("{}", export_configs_dot(&es));
            } else {
                println!("{} configurations", es.family().len());
                for c in es.family() {
                    println!("{}", es.show(c));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Histories { file } => {
            let es = load(&file)?.embedding(false)?;
            for h in histories(&es) {
                println!("{}: {}", es.id(h.owner), es.show(&h.config));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Unfold { file, output } => {
            let m = load(&file)?;
            let es = m.embedding(false)?;
            let cp = canonical_pes(&es)?;
            let phi = cp.phi();
            write(&output, &serialize_es(&Model::Pes(cp.pes.clone())))?;
            print!("{}", serialize_map(&phi, cp.pes.ids(), es.ids()));
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckMorphism { src, dst, map } => {
            let (a, b) = (load(&src)?, load(&dst)?);
            let f = load_map(&map, &a, &b)?;
            let r = check_morphism(&a.embedding(false)?, &b.embedding(false)?, &f)?;
            print_report("morphism", &r);
            Ok(verdict(r.verdict()))
        }
        Command::CheckFolding { src, dst, map } => {
            let (a, b) = (load(&src)?, load(&dst)?);
            let f = load_map(&map, &a, &b)?;
            let r = folding_verdict(&a.embedding(false)?, &b.embedding(false)?, &f)?;
            print_report("folding", &r);
            let criteria = match (&a, &b) {
                (Model::Pes(p), Model::Pes(q)) => Some(check_folding_pes(p, q, &f)),
                (Model::Aes(p), Model::Aes(q)) => Some(check_folding_aes(p, q, &f)),
                _ => None,
            };
            if let Some(Ok(c)) = criteria {
                print_report("criteria", &c);
            }
            Ok(verdict(r.verdict()))
        }
        Command::CheckAbstraction { src, dst, map } => {
            let (a, b) = (load(&src)?, load(&dst)?);
            let (Model::Pes(p), Model::Pes(q)) = (&a, &b) else {
                return Err(Error::WrongClass { expected: "pes".into(), found: format!("{} and {}", a.kind(), b.kind()) });
            };
            let f = load_map(&map, &a, &b)?;
            let r = check_abstraction_hom(p, q, &f)?;
            print_report("abstraction", &r.report);
            print_report("folding", &r.folding);
            Ok(verdict(r.report.verdict()))
        }
        Command::Quotient { src, eq, output } => {
            let m = load(&src)?;
            let part = parse_eq(&read(&eq)?, m.ids())?;
            let es = m.embedding(false)?;
            let (q, f) = quotient(&es, &part)?;
            let r = folding_verdict(&es, &q, &f)?;
            let out = narrowest(q);
            write(&output, &serialize_es(&out))?;
            print!("{}", serialize_map(&f, es.ids(), out.ids()));
            print_report("folding", &r);
            Ok(ExitCode::SUCCESS)
        }
        Command::Join { src, map1, dst1, map2, dst2, output } => {
            let (s, d1, d2) = (load(&src)?, load(&dst1)?, load(&dst2)?);
            let f1 = load_map(&map1, &s, &d1)?;
            let f2 = load_map(&map2, &s, &d2)?;
            let (es, e1, e2) = (s.embedding(false)?, d1.embedding(false)?, d2.embedding(false)?);
            let j = match join_foldings(&es, &e1, &f1, &e2, &f2) {
                Err(Error::NotFoldings(r)) => {
                    print_report("foldings", &r);
                    return Ok(ExitCode::from(1));
                }
                other => other?,
            };
            let out = narrowest(j.es);
            write(&output, &serialize_es(&out))?;
            println!("# {} -> join", dst1.display());
            print!("{}", serialize_map(&j.g1, e1.ids(), out.ids()));
            println!("# {} -> join", dst2.display());
            print!("{}", serialize_map(&j.g2, e2.ids(), out.ids()));
            Ok(ExitCode::SUCCESS)
        }
        Command::Minimize { file, class, output } => {
            let m = load(&file)?;
            let res = minimize(&m, class)?;
            let ids = m.ids();
            println!("{} maximal folding equivalence(s) in class {}", res.solutions.len(), res.class);
            let stem = file.file_stem().map_or_else(|| "min".to_string(), |s| s.to_string_lossy().into_owned());
            for (i, s) in res.solutions.iter().enumerate() {
                println!("# solution {i}: {}", s.partition.canonical_string(ids));
                print!("{}", serialize_es(&s.quotient));
                if let Some(dir) = &output {
                    fs::create_dir_all(dir)?;
                    let file = |ext: &str| dir.join(format!("{stem}.min{i}.{ext}"));
                    write(&file("es"), &serialize_es(&s.quotient))?;
                    write(&file("eq"), &serialize_eq(&s.partition, ids))?;
                    write(&file("map"), &serialize_map(&s.folding, ids, s.quotient.ids()))?;
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bisim { f1, f2, hp, hhp: _ } => {
            let (a, b) = (load(&f1)?.embedding(false)?, load(&f2)?.embedding(false)?);
            let name = if hp { "hp-bisimilar" } else { "hhp-bisimilar" };
            match decide_bisim(&a, &b, !hp)? {
                Some(rel) => {
                    println!("{name}: yes ({} triples)", rel.triples.len());
                    Ok(ExitCode::SUCCESS)
                }
                None => {
                    println!("{name}: no");
                    Ok(ExitCode::from(1))
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
