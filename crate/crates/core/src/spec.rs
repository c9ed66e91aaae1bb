//! Prior and channel specifications: JSON documents and the inline
//! `family:params` shorthand.
//!
//! JSON priors take one of the shapes
//!
//! ```text
//! {"family": "gaussian", "params": {"mean": 0, "var": 1}}
//! {"table": [[x, f], ...], "normalize": false}
//! {"atoms": [[x, p], ...]}
//! {"mixture": {"alpha": a, "continuous": {...}, "atoms": [[x, p], ...]}}
//! {"product": [spec, ...]}
//! ```
//!
//! Families: `gaussian {mean, var}`, `uniform {a, b}`, `exponential {rate}`,
//! `gaussian_mixture {weights, means, vars}`, `bernoulli {p}` (atoms at 0
//! and 1).
//!
//! Shorthand: `gaussian:0,1`, `uniform:0,1`, `exponential:2`, `bernoulli:0.3`,
//! `atoms:-1@0.5,1@0.5`, `table:-1@0,0@1,1@0` (rescaled to unit mass),
//! `gaussian_mixture:0.5@-3@0.5,0.5@3@0.5` (weight@mean@var),
//! `mixture:0.5|gaussian:0,1|atoms:0@1`. Factors of a product prior are
//! joined with `*`.

use serde_json::{Map, Value};

use crate::channel::GaussianChannel;
use crate::error::{Result, ZzbError};
use crate::prior::{AtomList, ContinuousLaw, Prior, ProductPrior, ScalarPrior, Table};

fn spec_err(location: impl Into<String>, message: impl Into<String>) -> ZzbError {
    ZzbError::Spec {
        location: location.into(),
        message: message.into(),
    }
}

/// Re-labels a validation error from a constructor with the spec location.
fn at<T>(location: &str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        ZzbError::Spec { .. } => e,
        other => spec_err(location, other.to_string()),
    })
}

fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        spec_err(
            format!("line {}, column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

/// Parses a JSON prior document.
pub fn prior_from_json(text: &str) -> Result<Prior> {
    prior_from_value(&parse_text(text)?, "$")
}

/// Parses a prior that is already a JSON value; `path` prefixes diagnostics.
pub fn prior_from_value(v: &Value, path: &str) -> Result<Prior> {
    let obj = object(v, path)?;
    if let Some(list) = obj.get("product") {
        let p = format!("{path}.product");
        let items = list
            .as_array()
            .ok_or_else(|| spec_err(&p, "expected an array of prior specs"))?;
        let mut factors = Vec::with_capacity(items.len());
        for (i, item) in items.iter().enumerate() {
            factors.push(scalar_from_value(item, &format!("{p}[{i}]"))?);
        }
        return Ok(Prior::Product(at(&p, ProductPrior::new(factors))?));
    }
    Ok(Prior::Scalar(scalar_from_value(v, path)?))
}

/// Parses a scalar prior JSON value.
pub fn scalar_from_value(v: &Value, path: &str) -> Result<ScalarPrior> {
    let obj = object(v, path)?;
    if obj.contains_key("product") {
        return Err(spec_err(path, "nested product priors are not allowed"));
    }
    if let Some(m) = obj.get("mixture") {
        let p = format!("{path}.mixture");
        let mo = object(m, &p)?;
        let alpha = number(mo, "alpha", &p)?;
        let cont = match mo.get("continuous") {
            Some(c) => Some(continuous_from_value(c, &format!("{p}.continuous"))?),
            None => None,
        };
        let atoms = match mo.get("atoms") {
            Some(a) => Some(atoms_from_value(a, &format!("{p}.atoms"))?),
            None => None,
        };
        return at(&p, ScalarPrior::mixture(alpha, cont, atoms));
    }
    if let Some(a) = obj.get("atoms") {
        let atoms = atoms_from_value(a, &format!("{path}.atoms"))?;
        return at(path, ScalarPrior::mixture(0.0, None, Some(atoms)));
    }
    if obj.get("family").and_then(Value::as_str) == Some("bernoulli") {
        let params = params(obj, path)?;
        let p = number(params, "p", &format!("{path}.params"))?;
        return at(path, ScalarPrior::bernoulli(p));
    }
    at(path, ScalarPrior::continuous(continuous_from_value(v, path)?))
}

fn continuous_from_value(v: &Value, path: &str) -> Result<ContinuousLaw> {
    let obj = object(v, path)?;
    if let Some(t) = obj.get("table") {
        let p = format!("{path}.table");
        let pairs = pairs(t, &p)?;
        let normalize = match obj.get("normalize") {
            None => false,
            Some(Value::Bool(b)) => *b,
            Some(_) => return Err(spec_err(format!("{path}.normalize"), "expected a boolean")),
        };
        let (xs, fs) = pairs.into_iter().unzip();
        let table = if normalize {
            Table::normalized(xs, fs)
        } else {
            Table::new(xs, fs)
        };
        return Ok(ContinuousLaw::Tabulated(at(&p, table)?));
    }
    let family = obj
        .get("family")
        .ok_or_else(|| spec_err(path, "expected one of family, table, atoms, mixture, product"))?
        .as_str()
        .ok_or_else(|| spec_err(format!("{path}.family"), "expected a string"))?;
    let params = params(obj, path)?;
    let pp = format!("{path}.params");
    let law = match family {
        "gaussian" => ContinuousLaw::Gaussian {
            mean: number(params, "mean", &pp)?,
            var: number(params, "var", &pp)?,
        },
        "uniform" => ContinuousLaw::Uniform {
            a: number(params, "a", &pp)?,
            b: number(params, "b", &pp)?,
        },
        "exponential" => ContinuousLaw::Exponential {
            rate: number(params, "rate", &pp)?,
        },
        "gaussian_mixture" => ContinuousLaw::GaussianMixture {
            weights: numbers(params, "weights", &pp)?,
            means: numbers(params, "means", &pp)?,
            vars: numbers(params, "vars", &pp)?,
        },
        other => {
            return Err(spec_err(
                format!("{path}.family"),
                format!("unknown continuous family `{other}`"),
            ))
        }
    };
    at(&pp, law.validate())?;
    Ok(law)
}

fn atoms_from_value(v: &Value, path: &str) -> Result<AtomList> {
    let pairs = pairs(v, path)?;
    at(path, AtomList::new(&pairs))
}

fn object<'v>(v: &'v Value, path: &str) -> Result<&'v Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| spec_err(path, "expected a JSON object"))
}

fn params<'v>(obj: &'v Map<String, Value>, path: &str) -> Result<&'v Map<String, Value>> {
    let p = obj
        .get("params")
        .ok_or_else(|| spec_err(path, "missing field `params`"))?;
    object(p, &format!("{path}.params"))
}

fn number(obj: &Map<String, Value>, key: &str, path: &str) -> Result<f64> {
    obj.get(key)
        .ok_or_else(|| spec_err(path, format!("missing field `{key}`")))?
        .as_f64()
        .ok_or_else(|| spec_err(format!("{path}.{key}"), "expected a number"))
}

fn numbers(obj: &Map<String, Value>, key: &str, path: &str) -> Result<Vec<f64>> {
    let p = format!("{path}.{key}");
    let arr = obj
        .get(key)
        .ok_or_else(|| spec_err(path, format!("missing field `{key}`")))?
        .as_array()
        .ok_or_else(|| spec_err(&p, "expected an array of numbers"))?;
    arr.iter()
        .enumerate()
        .map(|(i, x)| {
            x.as_f64()
                .ok_or_else(|| spec_err(format!("{p}[{i}]"), "expected a number"))
        })
        .collect()
}

fn pairs(v: &Value, path: &str) -> Result<Vec<(f64, f64)>> {
    let arr = v
        .as_array()
        .ok_or_else(|| spec_err(path, "expected an array of [x, value] pairs"))?;
    arr.iter()
        .enumerate()
        .map(|(i, item)| match item.as_array().map(Vec::as_slice) {
            Some([a, b]) => match (a.as_f64(), b.as_f64()) {
                (Some(a), Some(b)) => Ok((a, b)),
                _ => Err(spec_err(format!("{path}[{i}]"), "expected two numbers")),
            },
            _ => Err(spec_err(format!("{path}[{i}]"), "expected a [x, value] pair")),
        })
        .collect()
}

/// Parses `{"channel": "gaussian", "eta": 1.0, "dim": 1}`; `dim` defaults
/// to 1.
pub fn channel_from_json(text: &str) -> Result<GaussianChannel> {
    let v = parse_text(text)?;
    let obj = object(&v, "$")?;
    match obj.get("channel").map(|c| c.as_str()) {
        Some(Some("gaussian")) => {}
        Some(_) => return Err(spec_err("$.channel", "only \"gaussian\" is supported")),
        None => return Err(spec_err("$", "missing field `channel`")),
    }
    let eta = number(obj, "eta", "$")?;
    let dim = match obj.get("dim") {
        None => 1,
        Some(d) => d
            .as_u64()
            .ok_or_else(|| spec_err("$.dim", "expected a positive integer"))?
            as usize,
    };
    at("$", GaussianChannel::new(eta, dim))
}

/// Parses the inline shorthand described in the module docs.
pub fn prior_from_shorthand(s: &str) -> Result<Prior> {
    let parts: Vec<&str> = s.split('*').collect();
    if parts.len() == 1 {
        return Ok(Prior::Scalar(scalar_shorthand(s)?));
    }
    let factors = parts
        .iter()
        .map(|p| scalar_shorthand(p))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prior::Product(at(s, ProductPrior::new(factors))?))
}

fn scalar_shorthand(s: &str) -> Result<ScalarPrior> {
    let s = s.trim();
    let (family, rest) = s
        .split_once(':')
        .ok_or_else(|| spec_err(s, "expected family:params"))?;
    match family {
        "mixture" => {
            let fields: Vec<&str> = rest.split('|').collect();
            let [alpha, cont, atoms] = fields.as_slice() else {
                return Err(spec_err(s, "expected mixture:alpha|continuous|atoms"));
            };
            let alpha = real(alpha, s)?;
            let cont = continuous_shorthand(cont)?;
            let atoms = match atoms.trim().split_once(':') {
                Some(("atoms", list)) => at(s, AtomList::new(&at_pairs(list, s)?))?,
                _ => return Err(spec_err(s, "third mixture field must be atoms:x@p,...")),
            };
            at(s, ScalarPrior::mixture(alpha, Some(cont), Some(atoms)))
        }
        "atoms" => at(s, ScalarPrior::discrete(&at_pairs(rest, s)?)),
        "bernoulli" => {
            let [p] = reals::<1>(rest, s)?;
            at(s, ScalarPrior::bernoulli(p))
        }
        _ => at(s, ScalarPrior::continuous(continuous_shorthand(s)?)),
    }
}

fn continuous_shorthand(s: &str) -> Result<ContinuousLaw> {
    let s = s.trim();
    let (family, rest) = s
        .split_once(':')
        .ok_or_else(|| spec_err(s, "expected family:params"))?;
    let law = match family {
        "gaussian" => {
            let [mean, var] = reals::<2>(rest, s)?;
            ContinuousLaw::Gaussian { mean, var }
        }
        "uniform" => {
            let [a, b] = reals::<2>(rest, s)?;
            ContinuousLaw::Uniform { a, b }
        }
        "exponential" => {
            let [rate] = reals::<1>(rest, s)?;
            ContinuousLaw::Exponential { rate }
        }
        "gaussian_mixture" => {
            let mut weights = Vec::new();
            let mut means = Vec::new();
            let mut vars = Vec::new();
            for comp in rest.split(',') {
                let f: Vec<&str> = comp.split('@').collect();
                let [w, m, v] = f.as_slice() else {
                    return Err(spec_err(s, format!("component `{comp}` is not weight@mean@var")));
                };
                weights.push(real(w, s)?);
                means.push(real(m, s)?);
                vars.push(real(v, s)?);
            }
            ContinuousLaw::GaussianMixture {
                weights,
                means,
                vars,
            }
        }
        "table" => {
            let (xs, fs) = at_pairs(rest, s)?.into_iter().unzip();
            ContinuousLaw::Tabulated(at(s, Table::normalized(xs, fs))?)
        }
        other => return Err(spec_err(s, format!("unknown family `{other}`"))),
    };
    at(s, law.validate())?;
    Ok(law)
}

fn real(tok: &str, ctx: &str) -> Result<f64> {
    tok.trim()
        .parse()
        .map_err(|_| spec_err(ctx, format!("`{}` is not a number", tok.trim())))
}

fn reals<const N: usize>(list: &str, ctx: &str) -> Result<[f64; N]> {
    let toks: Vec<&str> = list.split(',').collect();
    if toks.len() != N {
        return Err(spec_err(
            ctx,
            format!("expected {N} parameter(s), got {}", toks.len()),
        ));
    }
    let mut out = [0.0; N];
    for (o, t) in out.iter_mut().zip(toks) {
        *o = real(t, ctx)?;
    }
    Ok(out)
}

fn at_pairs(list: &str, ctx: &str) -> Result<Vec<(f64, f64)>> {
    list.split(',')
        .map(|item| {
            let (a, b) = item
                .split_once('@')
                .ok_or_else(|| spec_err(ctx, format!("`{item}` is not x@value")))?;
            Ok((real(a, ctx)?, real(b, ctx)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(p: Prior) -> ScalarPrior {
        match p {
            Prior::Scalar(s) => s,
            Prior::Product(_) => panic!("expected a scalar prior"),
        }
    }

    #[test]
    fn json_shapes() {
        let g = scalar(prior_from_json(r#"{"family":"gaussian","params":{"mean":1,"var":4}}"#).unwrap());
        assert_eq!(g, ScalarPrior::gaussian(1.0, 4.0).unwrap());
        let a = scalar(prior_from_json(r#"{"atoms":[[-1,0.5],[1,0.5]]}"#).unwrap());
        assert_eq!(a, ScalarPrior::discrete(&[(-1.0, 0.5), (1.0, 0.5)]).unwrap());
        let t = scalar(prior_from_json(r#"{"table":[[0,2],[1,2]],"normalize":true}"#).unwrap());
        assert!((t.density_at(0.5) - 1.0).abs() < 1e-15);
        let m = scalar(
            prior_from_json(
                r#"{"mixture":{"alpha":0.5,"continuous":{"family":"uniform","params":{"a":0,"b":1}},"atoms":[[3,1]]}}"#,
            )
            .unwrap(),
        );
        assert_eq!(m.alpha(), 0.5);
        assert_eq!(m.mass_at(3.0), 0.5);
        let p = prior_from_json(
            r#"{"product":[{"family":"bernoulli","params":{"p":0.3}},{"family":"exponential","params":{"rate":2}}]}"#,
        )
        .unwrap();
        assert_eq!(p.dim(), 2);
    }

    #[test]
    fn json_errors_carry_locations() {
        let e = prior_from_json("{\n  \"family\": \"gaussian\",\n  \"params\": {\"mean\": 0,}\n}").unwrap_err();
        match e {
            ZzbError::Spec { location, .. } => assert!(location.starts_with("line 3"), "{location}"),
            other => panic!("{other:?}"),
        }
        let e = prior_from_json(r#"{"family":"gaussian","params":{"mean":0,"var":"x"}}"#).unwrap_err();
        assert!(matches!(e, ZzbError::Spec { ref location, .. } if location == "$.params.var"), "{e:?}");
        let e = prior_from_json(r#"{"family":"gaussian","params":{"mean":0,"var":-1}}"#).unwrap_err();
        assert!(matches!(e, ZzbError::Spec { ref location, .. } if location == "$.params"), "{e:?}");
        let e = prior_from_json(r#"{"product":[{"atoms":[[0,1]]},{"family":"cauchy","params":{}}]}"#)
            .unwrap_err();
        assert!(
            matches!(e, ZzbError::Spec { ref location, .. } if location == "$.product[1].family"),
            "{e:?}"
        );
    }

    #[test]
    fn shorthand_forms() {
        assert_eq!(
            scalar(prior_from_shorthand("gaussian:0,1").unwrap()),
            ScalarPrior::gaussian(0.0, 1.0).unwrap()
        );
        assert_eq!(
            scalar(prior_from_shorthand("bernoulli:0.3").unwrap()),
            ScalarPrior::bernoulli(0.3).unwrap()
        );
        let m = scalar(prior_from_shorthand("mixture:0.5|gaussian:0,1|atoms:0@1").unwrap());
        assert_eq!(m.mass_at(0.0), 0.5);
        let g = scalar(prior_from_shorthand("gaussian_mixture:0.5@-3@0.5,0.5@3@0.5").unwrap());
        assert_eq!(g.moments().0, 0.0);
        let t = scalar(prior_from_shorthand("table:-1@0,0@2,1@0").unwrap());
        assert!((t.density_at(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(prior_from_shorthand("uniform:0,1*exponential:1").unwrap().dim(), 2);
        assert!(prior_from_shorthand("gaussian:0").is_err());
        assert!(prior_from_shorthand("cauchy:0,1").is_err());
        assert!(prior_from_shorthand("atoms:0@0.5").is_err());
    }

    #[test]
    fn channel_json() {
        let c = channel_from_json(r#"{"channel":"gaussian","eta":0.5,"dim":3}"#).unwrap();
        assert_eq!(c.eta(), 0.5);
        assert_eq!(crate::channel::Channel::dim(&c), 3);
        assert!(channel_from_json(r#"{"channel":"poisson","eta":1}"#).is_err());
        assert!(channel_from_json(r#"{"channel":"gaussian","eta":-1}"#).is_err());
    }
}
