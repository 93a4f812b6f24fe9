//! Serializable forms of the mathematical objects. Every rational is a
//! string `"p/q"` or `"p"`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::adelic::{AdelicCurveSpec, Place};
use crate::error::{Error, Result};
use crate::filtration::FilteredSpace;
use crate::graded::{MonomialSeries, TableProvider};
use crate::pl::{AffineForm, ConcavePLFunction};
use crate::polytope::LatticePolytope;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::toric::ToricAdelicDivisor;

fn parse_all(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

fn format_all(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(format_rational).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub vertices: Vec<Vec<String>>,
}

impl PolytopeSpec {
    pub fn build(&self) -> Result<LatticePolytope> {
        let points: Vec<Vec<Rational>> = self.vertices.iter().map(|v| parse_all(v)).collect::<Result<_>>()?;
        let dim = points.first().map(Vec::len).ok_or_else(|| Error::input("polytope without vertices"))?;
        LatticePolytope::from_points(dim, &points)
    }
}

impl From<&LatticePolytope> for PolytopeSpec {
    fn from(p: &LatticePolytope) -> Self {
        PolytopeSpec { vertices: p.vertices().iter().map(|v| format_all(v)).collect() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceSpec {
    pub a: Vec<String>,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GreenSpec {
    pub pieces: Vec<PieceSpec>,
}

impl GreenSpec {
    pub fn build(&self, domain: &LatticePolytope) -> Result<ConcavePLFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok(AffineForm::new(parse_all(&p.a)?, parse_rational(&p.b)?)))
            .collect::<Result<Vec<_>>>()?;
        ConcavePLFunction::new(domain.clone(), pieces)
    }
}

impl From<&ConcavePLFunction> for GreenSpec {
    fn from(g: &ConcavePLFunction) -> Self {
        GreenSpec {
            pieces: g
                .pieces()
                .iter()
                .map(|p| PieceSpec { a: format_all(&p.slope), b: format_rational(&p.offset) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlaceSpec {
    pub label: String,
    pub weight: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSpec {
    pub places: Vec<PlaceSpec>,
}

impl CurveSpec {
    pub fn build(&self) -> Result<AdelicCurveSpec> {
        let places = self
            .places
            .iter()
            .map(|p| Ok(Place { label: p.label.clone(), weight: parse_rational(&p.weight)? }))
            .collect::<Result<Vec<_>>>()?;
        AdelicCurveSpec::new(places)
    }
}

impl From<&AdelicCurveSpec> for CurveSpec {
    fn from(c: &AdelicCurveSpec) -> Self {
        CurveSpec {
            places: c
                .places()
                .iter()
                .map(|p| PlaceSpec { label: p.label.clone(), weight: format_rational(&p.weight) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorSpec {
    pub polytope: PolytopeSpec,
    #[serde(default)]
    pub greens: BTreeMap<String, GreenSpec>,
}

impl DivisorSpec {
    pub fn build(&self, curve: &AdelicCurveSpec) -> Result<ToricAdelicDivisor> {
        let polytope = self.polytope.build()?;
        let greens = self
            .greens
            .iter()
            .map(|(k, g)| Ok((k.clone(), g.build(&polytope)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        ToricAdelicDivisor::new(polytope, curve.clone(), greens)
    }
}

impl From<&ToricAdelicDivisor> for DivisorSpec {
    fn from(d: &ToricAdelicDivisor) -> Self {
        DivisorSpec {
            polytope: d.polytope().into(),
            greens: d
                .curve()
                .places()
                .iter()
                .map(|p| (p.label.clone(), d.green(&p.label).expect("every place has a green").into()))
                .collect(),
        }
    }
}

/// A filtered space: rows of `basis` are the adapted basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub basis: Vec<Vec<String>>,
    pub jumps: Vec<String>,
}

impl SpaceSpec {
    pub fn build(&self) -> Result<FilteredSpace> {
        let basis = self.basis.iter().map(|v| parse_all(v)).collect::<Result<Vec<_>>>()?;
        FilteredSpace::new(basis, parse_all(&self.jumps)?)
    }
}

impl From<&FilteredSpace> for SpaceSpec {
    fn from(s: &FilteredSpace) -> Self {
        SpaceSpec { basis: s.basis().iter().map(|v| format_all(v)).collect(), jumps: format_all(s.jumps()) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TablePoint {
    pub point: Vec<i64>,
    pub lambda: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableEntry {
    pub degree: Vec<u32>,
    pub points: Vec<TablePoint>,
}

/// A series either induced by a named toric divisor or given as a table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SeriesSpec {
    Toric {
        divisor: String,
    },
    Table {
        ambient_dim: usize,
        #[serde(default = "one")]
        grading_rank: usize,
        pieces: Vec<TableEntry>,
    },
}

fn one() -> usize {
    1
}

impl SeriesSpec {
    /// Builds the series; toric references are resolved in `divisors`.
    pub fn build(&self, divisors: &BTreeMap<String, ToricAdelicDivisor>) -> Result<MonomialSeries> {
        match self {
            SeriesSpec::Toric { divisor } => divisors
                .get(divisor)
                .map(ToricAdelicDivisor::to_series)
                .ok_or_else(|| Error::input(format!("unknown divisor {divisor:?}"))),
            SeriesSpec::Table { ambient_dim, grading_rank, pieces } => {
                let mut entries = BTreeMap::new();
                for e in pieces {
                    let piece = e
                        .points
                        .iter()
                        .map(|p| Ok((p.point.clone(), parse_rational(&p.lambda)?)))
                        .collect::<Result<Vec<_>>>()?;
                    if entries.insert(e.degree.clone(), piece).is_some() {
                        return Err(Error::input(format!("degree {:?} listed twice", e.degree)));
                    }
                }
                let provider = TableProvider::new(*ambient_dim, *grading_rank, entries)?;
                Ok(MonomialSeries::new(*ambient_dim, *grading_rank, Arc::new(provider)))
            }
        }
    }
}
