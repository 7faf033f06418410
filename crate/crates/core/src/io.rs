//! JSON documents for weights, vectors, trajectories, perturbations and
//! reports.

use serde_json::{json, Map, Value};

use crate::classify::{ClassificationReport, FhcReport, SeriesSum, Verdict};
use crate::conjugacy::{ConjugacyResult, PerturbationMap};
use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar, ScalarField};
use crate::shadowing::{OracleResult, PseudoTrajectory, ShadowResult};
use crate::spaces::{SeqVector, SpaceSpec};
use crate::weights::{DichotomyConstants, TailRates, UnilateralSums, UnilateralWeights, WeightSequence};

pub trait ToJson {
    fn to_json(&self) -> Value;
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn field<'a>(obj: &'a Value, keys: &[&str]) -> Option<&'a Value> {
    keys.iter().find_map(|k| obj.get(*k))
}

fn required<'a>(obj: &'a Value, keys: &[&str]) -> Result<&'a Value> {
    field(obj, keys).ok_or_else(|| parse_err(format!("missing key `{}`", keys[0])))
}

fn int_field(obj: &Value, keys: &[&str]) -> Result<i64> {
    required(obj, keys)?
        .as_i64()
        .ok_or_else(|| parse_err(format!("`{}` must be an integer", keys[0])))
}

fn scalar_list<S: Scalar>(v: &Value, what: &str) -> Result<Vec<S>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("`{what}` must be an array")))?
        .iter()
        .map(|x| S::from_json(x).map_err(|e| parse_err(format!("{what}: {e}"))))
        .collect()
}

fn optional_list<S: Scalar>(obj: &Value, keys: &[&str]) -> Result<Vec<S>> {
    match field(obj, keys) {
        Some(v) => scalar_list(v, keys[0]),
        None => Ok(Vec::new()),
    }
}

fn to_list<S: Scalar>(xs: &[S]) -> Value {
    Value::Array(xs.iter().map(Scalar::to_json).collect())
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

/// The `scalar_field` declared by a weight spec (real when absent).
pub fn declared_field(doc: &Value) -> Result<ScalarField> {
    match doc.get("scalar_field").and_then(Value::as_str) {
        None | Some("real") => Ok(ScalarField::Real),
        Some("complex") => Ok(ScalarField::Complex),
        Some(other) => Err(parse_err(format!("unknown scalar_field `{other}`"))),
    }
}

pub fn weights_from_json<S: Scalar>(doc: &Value) -> Result<WeightSequence<S>> {
    if !doc.is_object() {
        return Err(parse_err("weight spec must be an object"));
    }
    if declared_field(doc)? == ScalarField::Complex && S::FIELD == ScalarField::Real {
        return Err(parse_err("complex weights need a complex scalar type"));
    }
    let left = optional_list(doc, &["left_tail", "left"])?;
    let right = optional_list(doc, &["right_tail", "right"])?;
    let core = optional_list(doc, &["core"])?;
    let core_start = match field(doc, &["core_start"]) {
        Some(v) => v.as_i64().ok_or_else(|| parse_err("`core_start` must be an integer"))?,
        None => 0,
    };
    WeightSequence::new(left, core_start, core, right)
}

pub fn weights_from_str<S: Scalar>(text: &str) -> Result<WeightSequence<S>> {
    weights_from_json(&parse_json(text)?)
}

/// `{core: [...], tail: [...]}`, indices starting at 1.
pub fn unilateral_from_json<S: Scalar>(doc: &Value) -> Result<UnilateralWeights<S>> {
    let core = optional_list(doc, &["core"])?;
    let tail = optional_list(doc, &["tail", "right_tail", "right"])?;
    UnilateralWeights::new(core, tail)
}

pub fn vector_from_json<S: Scalar>(doc: &Value) -> Result<SeqVector<S>> {
    let lo = match field(doc, &["lo"]) {
        Some(v) => v.as_i64().ok_or_else(|| parse_err("`lo` must be an integer"))?,
        None => 0,
    };
    Ok(SeqVector::new(lo, scalar_list(required(doc, &["coeffs"])?, "coeffs")?))
}

pub fn trajectory_from_json<S: Scalar>(doc: &Value) -> Result<PseudoTrajectory<S>> {
    let n0 = int_field(doc, &["n0"])?;
    let delta = S::Real::from_json(required(doc, &["delta"])?).map_err(parse_err)?;
    let points = required(doc, &["points"])?
        .as_array()
        .ok_or_else(|| parse_err("`points` must be an array"))?
        .iter()
        .map(vector_from_json)
        .collect::<Result<Vec<_>>>()?;
    if points.is_empty() {
        return Err(Error::TooShort(0));
    }
    Ok(PseudoTrajectory::new(n0, points, delta))
}

/// Perturbation specs: `constant`, `coordinate_rank_one` or `cutoff_affine`.
pub fn perturbation_from_json<S: Scalar>(doc: &Value, space: SpaceSpec) -> Result<PerturbationMap<S>> {
    let kind = required(doc, &["kind"])?
        .as_str()
        .ok_or_else(|| parse_err("`kind` must be a string"))?;
    match kind {
        "constant" => Ok(PerturbationMap::constant(space, vector_from_json(required(doc, &["vector"])?)?)),
        "coordinate_rank_one" => {
            let index = int_field(doc, &["functional_index"])?;
            let direction = vector_from_json(required(doc, &["direction"])?)?;
            let gain = S::from_json(required(doc, &["gain"])?).map_err(parse_err)?;
            Ok(PerturbationMap::coordinate_rank_one(space, index, direction, gain))
        }
        "cutoff_affine" => {
            let m = required(doc, &["matrix_window"])?;
            let in_lo = int_field(m, &["in_lo"])?;
            let out_lo = int_field(m, &["out_lo"])?;
            let rows = required(m, &["rows"])?
                .as_array()
                .ok_or_else(|| parse_err("`rows` must be an array"))?
                .iter()
                .map(|r| scalar_list(r, "rows"))
                .collect::<Result<Vec<_>>>()?;
            let offset = optional_list(m, &["offset"])?;
            PerturbationMap::cutoff_affine(space, in_lo, out_lo, rows, offset)
        }
        other => Err(parse_err(format!("unknown perturbation kind `{other}`"))),
    }
}

impl<S: Scalar> ToJson for SeqVector<S> {
    fn to_json(&self) -> Value {
        json!({ "lo": self.lo(), "coeffs": to_list(self.coeffs()) })
    }
}

impl<S: Scalar> ToJson for WeightSequence<S> {
    fn to_json(&self) -> Value {
        json!({
            "scalar_field": S::FIELD.as_str(),
            "left_tail": to_list(self.left_tail()),
            "core_start": self.core_start(),
            "core": to_list(self.core()),
            "right_tail": to_list(self.right_tail()),
        })
    }
}

impl<S: Scalar> ToJson for UnilateralWeights<S> {
    fn to_json(&self) -> Value {
        json!({ "core": to_list(self.core()), "tail": to_list(self.tail()) })
    }
}

impl<S: Scalar> ToJson for PseudoTrajectory<S> {
    fn to_json(&self) -> Value {
        json!({
            "n0": self.n0,
            "delta": self.delta.to_json(),
            "points": self.points.iter().map(ToJson::to_json).collect::<Vec<_>>(),
        })
    }
}

impl<R: Real> ToJson for TailRates<R> {
    fn to_json(&self) -> Value {
        json!({
            "g_left": self.g_left.to_json(),
            "g_right": self.g_right.to_json(),
            "left_product": self.left_product.to_json(),
            "right_product": self.right_product.to_json(),
            "left_period": self.left_period,
            "right_period": self.right_period,
        })
    }
}

impl<R: Real> ToJson for DichotomyConstants<R> {
    fn to_json(&self) -> Value {
        json!({
            "beta": self.beta.to_json(),
            "s": self.s.to_json(),
            "c": self.c.to_json(),
            "t": self.t.to_json(),
        })
    }
}

fn verdict_json(v: Verdict) -> Value {
    match v.as_bool() {
        Some(b) => Value::Bool(b),
        None => Value::from("boundary"),
    }
}

impl<R: Real> ToJson for ClassificationReport<R> {
    fn to_json(&self) -> Value {
        let mut out = Map::new();
        out.insert("shadowing_class".into(), self.shadowing_class.as_str().into());
        if let Value::Object(rates) = self.rates.to_json() {
            out.extend(rates);
        }
        out.insert("hyperbolic".into(), verdict_json(self.hyperbolic));
        out.insert("uniform_expansivity".into(), self.uniform_expansivity.as_str().into());
        out.insert("tolerance_used".into(), json_f64(self.tolerance_used));
        out.insert("arithmetic_mode".into(), self.arithmetic_mode.as_str().into());
        out.insert(
            "boundary".into(),
            self.boundary
                .iter()
                .map(|b| json!({ "quantity": b.quantity, "value": json_f64(b.value), "distance": json_f64(b.distance) }))
                .collect(),
        );
        Value::Object(out)
    }
}

impl<R: Real> ToJson for SeriesSum<R> {
    fn to_json(&self) -> Value {
        json!({
            "partial_sum": self.partial_sum.to_json(),
            "terms": self.terms,
            "remainder": self.remainder.as_ref().map(Scalar::to_json),
        })
    }
}

impl<R: Real> ToJson for FhcReport<R> {
    fn to_json(&self) -> Value {
        json!({
            "forward_sum": self.forward_sum.to_json(),
            "backward_sum": self.backward_sum.to_json(),
            "tail_bound": self.tail_bound.as_ref().map(Scalar::to_json),
            "converges": self.converges,
            "forward": self.forward.to_json(),
            "backward": self.backward.to_json(),
        })
    }
}

impl<R: Real> ToJson for UnilateralSums<R> {
    fn to_json(&self) -> Value {
        json!({
            "q2": self.q2.to_json(),
            "q2_length": self.q2_length,
            "q3": self.q3.as_ref().map_or(Value::from("infinity"), Scalar::to_json),
            "q3_partial": self.q3_partial.to_json(),
            "q3_tail_bound": self.q3_tail_bound.as_ref().map(Scalar::to_json),
            "q4": self.q4.as_ref().map_or(Value::from("infinity"), Scalar::to_json),
            "rate": self.rate.to_json(),
            "period_product": self.period_product.to_json(),
        })
    }
}

impl<S: Scalar> ToJson for ShadowResult<S> {
    fn to_json(&self) -> Value {
        json!({
            "shadow_point": self.shadow_point.to_json(),
            "max_error": self.max_error.to_json(),
            "error_bound": self.error_bound.to_json(),
            "per_step_errors": to_list(&self.per_step_errors),
            "n0": self.n0,
            "recurrence_defect": self.recurrence_defect.to_json(),
            "recurrence_scale": self.recurrence_scale.to_json(),
            "orbit_consistency": self.orbit_consistency.to_json(),
            "orbit_scale": self.orbit_scale.to_json(),
            "constants": { "c": self.constants.c.to_json(), "t": self.constants.t.to_json() },
            "delta_used": self.delta_used.to_json(),
        })
    }
}

impl<R: Real> ToJson for OracleResult<R> {
    fn to_json(&self) -> Value {
        json!({
            "best_point": self.best_point.to_json(),
            "best_error": self.best_error.to_json(),
            "lower_bound": self.lower_bound.to_json(),
            "exact": self.exact,
            "unreachable": self.unreachable.to_json(),
        })
    }
}

impl<S: Scalar> ToJson for ConjugacyResult<S> {
    fn to_json(&self) -> Value {
        json!({
            "point": self.point.to_json(),
            "image": self.image.to_json(),
            "correction": self.correction.to_json(),
            "series_tail_bound": self.series_tail_bound.to_json(),
            "fixed_point_iterations": self.fixed_point_iterations,
            "residual": self.residual.to_json(),
            "increments": to_list(&self.increments),
            "contraction_rate": self.contraction_rate().map(json_f64),
            "constants": self.constants.to_json(),
        })
    }
}

fn json_f64(x: f64) -> Value {
    x.to_json()
}
