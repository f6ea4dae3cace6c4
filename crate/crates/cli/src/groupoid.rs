use std::path::{Path, PathBuf};

use clap::Subcommand;
use morpho_core::groupoid::io::{groupoid_to_json, parse_groupoid, parse_subgroupoid, subgroupoid_to_json};
use morpho_core::groupoid::{
    counterexample, normality_witness, normalizoid, ConjugationWitness, FiniteGroupoid, Subgroupoid,
};
use serde::Serialize;

use crate::{emit, Failure};

#[derive(Subcommand)]
pub enum GroupoidCommand {
    /// Check the groupoid axioms; prints a JSON report
    Check { file: PathBuf },
    /// Is SUB a normal subgroupoid of FILE? Prints a witness when not
    Normal { file: PathBuf, sub: PathBuf },
    /// Largest subgroupoid over the base of SUB in which SUB is normal
    Normalizoid {
        file: PathBuf,
        sub: PathBuf,
        /// Write the normalizoid as a subgroupoid file
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the two-object S3 counterexample (groupoid.json, sub.json) into DIR
    Counterexample { dir: PathBuf },
}

#[derive(Serialize)]
struct CheckReport {
    valid: bool,
    objects: usize,
    arrows: usize,
    orbits: Vec<Vec<String>>,
    transitive: bool,
    violations: Vec<ViolationRecord>,
}

#[derive(Serialize)]
struct ViolationRecord {
    axiom: String,
    arrows: Vec<String>,
    detail: String,
}

#[derive(Serialize)]
struct WitnessRecord {
    g: String,
    h: String,
    conjugate: String,
}

#[derive(Serialize)]
struct NormalReport {
    normal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<WitnessRecord>,
}

#[derive(Serialize)]
struct NormalizoidReport {
    arrow_count: usize,
    transitive: bool,
    orbits: Vec<Vec<String>>,
    base: Vec<String>,
    arrows: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    out: Option<String>,
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<FiniteGroupoid, Failure> {
    parse_groupoid(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

/// Loads a groupoid that must satisfy the axioms.
fn load_valid(path: &Path) -> Result<FiniteGroupoid, Failure> {
    let g = load(path)?;
    if let Some(v) = g.validate().first() {
        return Err(Failure::Input(format!("{}: not a groupoid ({} axiom: {})", path.display(), v.axiom, v.detail)));
    }
    Ok(g)
}

fn load_sub(path: &Path, parent: &FiniteGroupoid) -> Result<Subgroupoid, Failure> {
    let sub = parse_subgroupoid(&read(path)?, parent).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    if let Some(d) = sub.defect(parent) {
        return Err(Failure::Input(format!("{}: not a subgroupoid ({d:?})", path.display())));
    }
    Ok(sub)
}

fn orbit_names(g: &FiniteGroupoid) -> Vec<Vec<String>> {
    g.orbits()
        .into_iter()
        .map(|o| o.into_iter().map(|x| g.object_name(x).to_string()).collect())
        .collect()
}

fn witness_record(g: &FiniteGroupoid, w: ConjugationWitness) -> WitnessRecord {
    WitnessRecord {
        g: g.arrow_name(w.g).into(),
        h: g.arrow_name(w.h).into(),
        conjugate: g.arrow_name(w.conjugate).into(),
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

pub fn run(cmd: GroupoidCommand) -> Result<(), Failure> {
    match cmd {
        GroupoidCommand::Check { file } => {
            let g = load(&file)?;
            let violations: Vec<ViolationRecord> = g
                .validate()
                .into_iter()
                .map(|v| ViolationRecord {
                    axiom: v.axiom.to_string(),
                    arrows: v.arrows.iter().map(|&a| g.arrow_name(a).to_string()).collect(),
                    detail: v.detail,
                })
                .collect();
            let report = CheckReport {
                valid: violations.is_empty(),
                objects: g.object_count(),
                arrows: g.arrow_count(),
                orbits: orbit_names(&g),
                transitive: g.is_transitive(),
                violations,
            };
            emit(None, &to_json(&report))
        }
        GroupoidCommand::Normal { file, sub } => {
            let g = load_valid(&file)?;
            let h = load_sub(&sub, &g)?;
            let witness = normality_witness(&g, &h).map(|w| witness_record(&g, w));
            let report = NormalReport {
                normal: witness.is_none(),
                witness,
            };
            emit(None, &to_json(&report))
        }
        GroupoidCommand::Normalizoid { file, sub, out } => {
            let g = load_valid(&file)?;
            let h = load_sub(&sub, &g)?;
            let n = normalizoid(&g, &h);
            if let Some(path) = &out {
                emit(Some(path), &(subgroupoid_to_json(&g, &n) + "\n"))?;
            }
            let restricted = n.to_groupoid(&g);
            let report = NormalizoidReport {
                arrow_count: n.len(),
                transitive: restricted.is_transitive(),
                orbits: orbit_names(&restricted),
                base: n.base.iter().map(|&x| g.object_name(x).to_string()).collect(),
                arrows: n.arrows.iter().map(|&a| g.arrow_name(a).to_string()).collect(),
                out: out.map(|p| p.display().to_string()),
            };
            emit(None, &to_json(&report))
        }
        GroupoidCommand::Counterexample { dir } => {
            let (g, h) = counterexample();
            std::fs::create_dir_all(&dir).map_err(|e| Failure::Output(format!("{}: {e}", dir.display())))?;
            emit(Some(&dir.join("groupoid.json")), &(groupoid_to_json(&g) + "\n"))?;
            emit(Some(&dir.join("sub.json")), &(subgroupoid_to_json(&g, &h) + "\n"))
        }
    }
}
