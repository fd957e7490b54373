//! Versioned JSON files for problem instances and certificates.
//!
//! Labels are 0-based in files. Maps are lists of `[label, vertex]` pairs and
//! values are plain integers.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::applications::{Decoded, Decoder, ProblemInstance};
use crate::complex::{label_iter, mask_of, Injection, Label, LabelledComplex, Rule, Vertex};
use crate::error::{Error, Result};
use crate::symmetry::PermutationGroup;
use crate::vsys::{EdgeVector, Selection, VectorSystem};

pub const FORMAT_VERSION: u32 = 1;

pub type MapEntry = Vec<(Label, Vertex)>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ComplexFile {
    Generated { labels: Vec<Label>, n: u32, rule: Rule },
    /// Generated by the listed maps and their restrictions.
    Explicit { labels: Vec<Label>, n: u32, maps: Vec<MapEntry> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupFile {
    /// Permutations preserving each part setwise.
    Parts { parts: Vec<Vec<Label>> },
    /// Closure of generators in one-line notation.
    Generators { degree: usize, generators: Vec<Vec<Label>> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CopyFile {
    pub name: String,
    pub gamma: Vec<(MapEntry, Vec<i64>)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyFile {
    pub r: usize,
    pub dim: usize,
    pub copies: Vec<CopyFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub format_version: u32,
    pub provenance: String,
    pub complex: ComplexFile,
    pub group: GroupFile,
    pub family: FamilyFile,
    pub target: Vec<(MapEntry, Vec<i64>)>,
    /// How to read a solution back, for instances produced by a reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<Decoder>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionEntry {
    pub copy: usize,
    pub map: MapEntry,
    pub coef: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format_version: u32,
    pub provenance: String,
    pub selection: Vec<SelectionEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoder: Option<Decoder>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoded: Option<Decoded>,
}

fn small(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Parse(format!("{x} does not fit in a 64-bit integer")))
}

fn smalls(v: &[BigInt]) -> Result<Vec<i64>> {
    v.iter().map(small).collect()
}

fn bigs(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn read_map(m: &MapEntry) -> Result<Injection> {
    Injection::from_pairs(m)
}

pub fn write_vector(j: &EdgeVector) -> Result<Vec<(MapEntry, Vec<i64>)>> {
    j.iter().map(|(m, v)| Ok((m.to_pairs(), smalls(v)?))).collect()
}

pub fn read_vector(dim: usize, entries: &[(MapEntry, Vec<i64>)]) -> Result<EdgeVector> {
    let parsed: Result<Vec<(Injection, Vec<BigInt>)>> = entries.iter().map(|(m, v)| Ok((read_map(m)?, bigs(v)))).collect();
    EdgeVector::from_entries(dim, parsed?)
}

fn write_complex(phi: &LabelledComplex) -> ComplexFile {
    let labels: Vec<Label> = label_iter(phi.labels()).collect();
    match phi.rule() {
        Some(rule) => ComplexFile::Generated { labels, n: phi.universe(), rule: rule.clone() },
        None => {
            let mut maps: Vec<Injection> = phi.all_maps();
            maps.sort();
            ComplexFile::Explicit { labels, n: phi.universe(), maps: maps.iter().map(Injection::to_pairs).collect() }
        }
    }
}

fn read_complex(c: &ComplexFile) -> Result<LabelledComplex> {
    match c {
        ComplexFile::Generated { labels, n, rule } => LabelledComplex::generated(mask_of(labels.iter().copied()), *n, rule.clone()),
        ComplexFile::Explicit { labels, n, maps } => {
            let maps: Result<Vec<Injection>> = maps.iter().map(read_map).collect();
            LabelledComplex::generated_by(mask_of(labels.iter().copied()), *n, maps?)
        }
    }
}

fn write_group(g: &PermutationGroup) -> GroupFile {
    match g.parts() {
        Some(masks) => GroupFile::Parts { parts: masks.iter().map(|&m| label_iter(m).collect()).collect() },
        None => GroupFile::Generators { degree: g.degree(), generators: g.generator_words() },
    }
}

fn read_group(g: &GroupFile) -> Result<PermutationGroup> {
    match g {
        GroupFile::Parts { parts } => PermutationGroup::part_stabilizer(parts.clone()),
        GroupFile::Generators { degree, generators } => PermutationGroup::from_generators(*degree, generators),
    }
}

impl ProblemFile {
    pub fn from_instance(inst: &ProblemInstance, decoder: Option<Decoder>) -> Result<Self> {
        let copies = inst
            .vs
            .copies()
            .iter()
            .map(|c| {
                let gamma: Result<Vec<_>> = c.support().map(|(m, v)| Ok((m.to_pairs(), smalls(v)?))).collect();
                Ok(CopyFile { name: c.name.clone(), gamma: gamma? })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ProblemFile {
            format_version: FORMAT_VERSION,
            provenance: inst.provenance.clone(),
            complex: write_complex(&inst.phi),
            group: write_group(&inst.group),
            family: FamilyFile { r: inst.vs.r(), dim: inst.vs.dim(), copies },
            target: write_vector(&inst.target)?,
            decoder,
        })
    }

    pub fn to_instance(&self) -> Result<ProblemInstance> {
        check_version(self.format_version)?;
        let phi = read_complex(&self.complex)?;
        let group = read_group(&self.group)?;
        let copies = self
            .family
            .copies
            .iter()
            .map(|c| {
                let entries: Result<Vec<_>> = c.gamma.iter().map(|(m, v)| Ok((read_map(m)?, bigs(v)))).collect();
                Ok((c.name.clone(), entries?))
            })
            .collect::<Result<Vec<_>>>()?;
        let vs = VectorSystem::new(group.clone(), self.family.r, self.family.dim, copies)?;
        let target = read_vector(self.family.dim, &self.target)?;
        let inst = ProblemInstance { phi, group, vs, target, provenance: self.provenance.clone() };
        inst.validate()?;
        Ok(inst)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }
}

fn check_version(v: u32) -> Result<()> {
    if v != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported format version {v}, expected {FORMAT_VERSION}")));
    }
    Ok(())
}

impl CertificateFile {
    pub fn new(provenance: &str, sel: &Selection, decoder: Option<Decoder>, decoded: Option<Decoded>) -> Result<Self> {
        let selection = sel
            .iter()
            .map(|((copy, m), c)| Ok(SelectionEntry { copy: *copy, map: m.to_pairs(), coef: small(c)? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(CertificateFile { format_version: FORMAT_VERSION, provenance: provenance.to_string(), selection, decoder, decoded })
    }

    pub fn selection(&self) -> Result<Selection> {
        check_version(self.format_version)?;
        let mut sel = Selection::new();
        for e in &self.selection {
            sel.add(e.copy, read_map(&e.map)?, BigInt::from(e.coef));
        }
        Ok(sel)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(Error::from)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::applications::{build_nonpartite, build_twisted_octahedron, reduce_resolvable, Multigraph};
    use crate::solver::{solve_exact, verify, SearchConfig, VerifyMode};

    fn round_trip(inst: &ProblemInstance) -> ProblemInstance {
        let text = serde_json::to_string(&ProblemFile::from_instance(inst, None).unwrap()).unwrap();
        ProblemFile::from_json(&text).unwrap().to_instance().unwrap()
    }

    #[test]
    fn problems_round_trip() {
        let fano = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(7, 2, 1)).unwrap();
        let back = round_trip(&fano);
        assert_eq!(back.target, fano.target);
        assert_eq!(back.vs, fano.vs);
        assert_eq!(back.phi.count(back.phi.labels()), fano.phi.count(fano.phi.labels()));
        let oct = build_twisted_octahedron().unwrap();
        let back = round_trip(&oct.instance);
        assert_eq!(back.target, oct.instance.target);
        assert_eq!(back.phi.level(4).len(), oct.instance.phi.level(4).len());
        let kts = reduce_resolvable(&Multigraph::complete(3, 2, 1), &Multigraph::complete(9, 2, 1), 1).unwrap();
        assert_eq!(round_trip(&kts.instance).target, kts.instance.target);
    }

    #[test]
    fn certificates_round_trip() {
        let fano = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(7, 2, 1)).unwrap();
        let out = solve_exact(&fano.phi, &fano.vs, &fano.target, &SearchConfig::default()).unwrap();
        let sel = out.outcome.found().unwrap();
        let cert = CertificateFile::new(&fano.provenance, sel, None, None).unwrap();
        let text = serde_json::to_string_pretty(&cert).unwrap();
        let back = CertificateFile::from_json(&text).unwrap().selection().unwrap();
        assert_eq!(&back, sel);
        assert!(verify(&fano.phi, &fano.vs, &back, &fano.target, VerifyMode::Set).ok);
    }

    #[test]
    fn version_is_checked() {
        let fano = build_nonpartite(&Multigraph::complete(3, 2, 1), &Multigraph::complete(7, 2, 1)).unwrap();
        let mut f = ProblemFile::from_instance(&fano, None).unwrap();
        f.format_version = 99;
        assert!(matches!(f.to_instance(), Err(Error::Parse(_))));
        assert!(matches!(ProblemFile::from_json("{"), Err(Error::Json(_))));
    }
}
