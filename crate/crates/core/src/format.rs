//! JSON reading and writing for games and mixed profiles.
//!
//! Game documents look like
//!
//! ```json
//! {
//!   "players": ["P1", "P2"],
//!   "actions": {"P1": ["a1", "a2"], "P2": ["b1", "b2"]},
//!   "payoffs": [
//!     {"profile": {"P1": "a1", "P2": "b1"}, "u": {"P1": 1, "P2": 1}},
//!     ...
//!   ]
//! }
//! ```
//!
//! with exactly one payoff record per pure profile. Payoffs may be JSON
//! numbers or decimal strings.

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, MixedProfile};

fn perr(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn parse_value(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| {
        perr(
            format!("line {} column {}", e.line(), e.column()),
            e.to_string(),
        )
    })
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| perr(path, "expected an object"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| perr(path, "expected a string"))
}

fn as_number(v: &Value, path: &str) -> Result<f64> {
    let x = match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| perr(path, "number out of range"))?,
        Value::String(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| perr(path, format!("cannot parse {:?} as a number", s)))?,
        _ => return Err(perr(path, "expected a number or decimal string")),
    };
    if !x.is_finite() {
        return Err(perr(path, "value is not finite"));
    }
    Ok(x)
}

/// Parses a game document.
pub fn game_from_json(text: &str) -> Result<Game> {
    let root = parse_value(text)?;
    let root = as_object(&root, "$")?;
    for key in root.keys() {
        if !matches!(key.as_str(), "players" | "actions" | "payoffs") {
            return Err(perr(format!("$.{}", key), "unknown field"));
        }
    }
    let players_v = root
        .get("players")
        .ok_or_else(|| perr("$.players", "missing field"))?
        .as_array()
        .ok_or_else(|| perr("$.players", "expected an array"))?;
    let mut players = Vec::new();
    for (k, p) in players_v.iter().enumerate() {
        players.push(as_str(p, &format!("$.players[{}]", k))?.to_string());
    }
    let actions_v = as_object(
        root.get("actions")
            .ok_or_else(|| perr("$.actions", "missing field"))?,
        "$.actions",
    )?;
    for key in actions_v.keys() {
        if !players.contains(key) {
            return Err(perr(format!("$.actions.{}", key), "not a listed player"));
        }
    }
    let mut actions = Vec::new();
    for p in &players {
        let path = format!("$.actions.{}", p);
        let list = actions_v
            .get(p)
            .ok_or_else(|| perr(&path, "missing action list"))?
            .as_array()
            .ok_or_else(|| perr(&path, "expected an array"))?;
        let mut names = Vec::new();
        for (k, a) in list.iter().enumerate() {
            names.push(as_str(a, &format!("{}[{}]", path, k))?.to_string());
        }
        actions.push(names);
    }
    let n = players.len();
    let counts: Vec<usize> = actions.iter().map(Vec::len).collect();
    if n == 0 || counts.iter().any(|&c| c == 0) {
        return Err(perr("$", "every game needs players with at least one action"));
    }
    let total: usize = counts.iter().product();
    let records = root
        .get("payoffs")
        .ok_or_else(|| perr("$.payoffs", "missing field"))?
        .as_array()
        .ok_or_else(|| perr("$.payoffs", "expected an array"))?;
    let mut strides = vec![1usize; n];
    for i in (0..n - 1).rev() {
        strides[i] = strides[i + 1] * counts[i + 1];
    }
    let mut tensor: Vec<Option<Vec<f64>>> = vec![None; total];
    for (r, rec) in records.iter().enumerate() {
        let path = format!("$.payoffs[{}]", r);
        let obj = as_object(rec, &path)?;
        for key in obj.keys() {
            if key != "profile" && key != "u" {
                return Err(perr(format!("{}.{}", path, key), "unknown field"));
            }
        }
        let prof = as_object(
            obj.get("profile")
                .ok_or_else(|| perr(format!("{}.profile", path), "missing field"))?,
            &format!("{}.profile", path),
        )?;
        let u = as_object(
            obj.get("u")
                .ok_or_else(|| perr(format!("{}.u", path), "missing field"))?,
            &format!("{}.u", path),
        )?;
        if prof.len() != n {
            return Err(perr(
                format!("{}.profile", path),
                format!("expected {} entries, found {}", n, prof.len()),
            ));
        }
        if u.len() != n {
            return Err(perr(
                format!("{}.u", path),
                format!("expected {} entries, found {}", n, u.len()),
            ));
        }
        let mut index = 0;
        let mut values = Vec::with_capacity(n);
        for (i, p) in players.iter().enumerate() {
            let ppath = format!("{}.profile.{}", path, p);
            let a = as_str(
                prof.get(p).ok_or_else(|| perr(&ppath, "missing player"))?,
                &ppath,
            )?;
            let k = actions[i]
                .iter()
                .position(|x| x == a)
                .ok_or_else(|| perr(&ppath, format!("unknown action {:?}", a)))?;
            index += k * strides[i];
            let upath = format!("{}.u.{}", path, p);
            values.push(as_number(
                u.get(p).ok_or_else(|| perr(&upath, "missing player"))?,
                &upath,
            )?);
        }
        if tensor[index].is_some() {
            return Err(perr(&path, "duplicate record for this profile"));
        }
        tensor[index] = Some(values);
    }
    if let Some(missing) = tensor.iter().position(Option::is_none) {
        let mut desc = Vec::new();
        let mut rem = missing;
        for i in 0..n {
            desc.push(format!("{}={}", players[i], actions[i][rem / strides[i]]));
            rem %= strides[i];
        }
        return Err(perr("$.payoffs", format!("missing record for profile {}", desc.join(", "))));
    }
    let flat: Vec<f64> = tensor.into_iter().flatten().flatten().collect();
    Game::new(players, actions, flat)
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// Formats a number: integral values without a fractional part, others in
/// shortest round-trip form, switching to exponent notation outside
/// `[1e-4, 1e15)`.
pub fn format_number(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else if x.is_finite() && (x.abs() < 1e-4 || x.abs() >= 1e15) {
        format!("{:e}", x)
    } else {
        format!("{}", x)
    }
}

/// Serializes a game in the canonical layout: one payoff record per line,
/// records in lexicographic profile order.
pub fn game_to_json(g: &Game) -> String {
    let players = g.players();
    let mut out = String::from("{\n  \"players\": [");
    out.push_str(&players.iter().map(|p| json_string(p)).collect::<Vec<_>>().join(", "));
    out.push_str("],\n  \"actions\": {\n");
    for (i, p) in players.iter().enumerate() {
        out.push_str(&format!(
            "    {}: [{}]{}\n",
            json_string(p),
            g.actions(i).iter().map(|a| json_string(a)).collect::<Vec<_>>().join(", "),
            if i + 1 < players.len() { "," } else { "" }
        ));
    }
    out.push_str("  },\n  \"payoffs\": [\n");
    let total = g.profile_count();
    for (k, prof) in g.profiles().enumerate() {
        let names: Vec<String> = prof
            .iter()
            .enumerate()
            .map(|(i, &a)| format!("{}: {}", json_string(&players[i]), json_string(&g.actions(i)[a])))
            .collect();
        let u: Vec<String> = g
            .payoff_vector(&prof)
            .iter()
            .enumerate()
            .map(|(i, &x)| format!("{}: {}", json_string(&players[i]), format_number(x)))
            .collect();
        out.push_str(&format!(
            "    {{\"profile\": {{{}}}, \"u\": {{{}}}}}{}\n",
            names.join(", "),
            u.join(", "),
            if k + 1 < total { "," } else { "" }
        ));
    }
    out.push_str("  ]\n}\n");
    out
}

/// Parses a profile document for `g`.
///
/// Each player maps either to an array of probabilities in action order or
/// to an object keyed by action name (missing actions get probability 0).
pub fn profile_from_json(g: &Game, text: &str) -> Result<MixedProfile> {
    let root = parse_value(text)?;
    profile_from_value(g, &root, "$")
}

pub fn profile_from_value(g: &Game, v: &Value, path: &str) -> Result<MixedProfile> {
    let obj = as_object(v, path)?;
    for key in obj.keys() {
        if g.player_index(key).is_none() {
            return Err(perr(format!("{}.{}", path, key), "not a player of this game"));
        }
    }
    let mut probs = Vec::new();
    for (i, p) in g.players().iter().enumerate() {
        let ppath = format!("{}.{}", path, p);
        let entry = obj.get(p).ok_or_else(|| perr(&ppath, "missing player"))?;
        let mut v = vec![0.0; g.num_actions(i)];
        match entry {
            Value::Array(list) => {
                if list.len() != v.len() {
                    return Err(perr(
                        &ppath,
                        format!("expected {} probabilities, found {}", v.len(), list.len()),
                    ));
                }
                for (k, x) in list.iter().enumerate() {
                    v[k] = as_number(x, &format!("{}[{}]", ppath, k))?;
                }
            }
            Value::Object(map) => {
                for (a, x) in map {
                    let k = g
                        .action_index(i, a)
                        .ok_or_else(|| perr(format!("{}.{}", ppath, a), "unknown action"))?;
                    v[k] = as_number(x, &format!("{}.{}", ppath, a))?;
                }
            }
            _ => return Err(perr(&ppath, "expected an array or object")),
        }
        probs.push(v);
    }
    MixedProfile::new(probs).map_err(|e| perr(path, e.to_string()))
}

/// Profile as a JSON object keyed by player and action names.
pub fn profile_to_value(g: &Game, p: &MixedProfile, round: impl Fn(f64) -> f64) -> Value {
    let mut root = Map::new();
    for (i, name) in g.players().iter().enumerate() {
        let mut inner = Map::new();
        for (k, a) in g.actions(i).iter().enumerate() {
            inner.insert(a.clone(), number_value(round(p.prob(i, k))));
        }
        root.insert(name.clone(), Value::Object(inner));
    }
    Value::Object(root)
}

/// JSON number for a finite float; integral values become integers.
pub fn number_value(x: f64) -> Value {
    if x == x.trunc() && x.abs() < 1e15 {
        Value::from(x as i64)
    } else {
        serde_json::Number::from_f64(x).map(Value::Number).unwrap_or(Value::Null)
    }
}

/// Rounds to `digits` significant decimal digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let s = format!("{:.*e}", digits.saturating_sub(1), x);
    s.parse().unwrap_or(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"{
      "players": ["A", "B"],
      "actions": {"A": ["x", "y"], "B": ["z"]},
      "payoffs": [
        {"profile": {"A": "y", "B": "z"}, "u": {"A": "0.5", "B": -2}},
        {"profile": {"A": "x", "B": "z"}, "u": {"A": 1, "B": 2}}
      ]
    }"#;

    #[test]
    fn parses_out_of_order_records_and_strings() {
        let g = game_from_json(SMALL).unwrap();
        assert_eq!(g.payoff(&[1, 0], 0), 0.5);
        assert_eq!(g.payoff(&[0, 0], 1), 2.0);
    }

    #[test]
    fn canonical_round_trip() {
        let g = game_from_json(SMALL).unwrap();
        let text = game_to_json(&g);
        let h = game_from_json(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(text, game_to_json(&h));
        assert!(text.contains("\"u\": {\"A\": 0.5, \"B\": -2}"));
    }

    #[test]
    fn duplicate_and_missing_records() {
        let dup = SMALL.replace("\"A\": \"y\", \"B\": \"z\"", "\"A\": \"x\", \"B\": \"z\"");
        let e = game_from_json(&dup).unwrap_err();
        assert!(e.to_string().contains("duplicate"), "{}", e);
        let missing = r#"{"players": ["A"], "actions": {"A": ["x", "y"]},
            "payoffs": [{"profile": {"A": "x"}, "u": {"A": 1}}]}"#;
        let e = game_from_json(missing).unwrap_err();
        assert!(e.to_string().contains("missing record for profile A=y"), "{}", e);
    }

    #[test]
    fn field_diagnostics() {
        let bad = SMALL.replace("\"0.5\"", "\"half\"");
        let e = game_from_json(&bad).unwrap_err();
        assert!(e.to_string().contains("$.payoffs[0].u.A"), "{}", e);
        let e = game_from_json("{\"players\": [").unwrap_err();
        assert!(e.to_string().contains("line 1"), "{}", e);
    }

    #[test]
    fn profiles_by_name_or_position() {
        let g = game_from_json(SMALL).unwrap();
        let p = profile_from_json(&g, r#"{"A": {"y": 0.25, "x": 0.75}, "B": [1]}"#).unwrap();
        assert_eq!(p.player(0), &[0.75, 0.25]);
        assert!(profile_from_json(&g, r#"{"A": {"w": 1}, "B": [1]}"#).is_err());
        assert!(profile_from_json(&g, r#"{"A": [0.5, 0.6], "B": [1]}"#).is_err());
    }

    #[test]
    fn number_formatting() {
        assert_eq!(format_number(-2.0), "-2");
        assert_eq!(format_number(0.25), "0.25");
        assert_eq!(format_number(2.955937825687224e-11), "2.955937825687224e-11");
        assert_eq!(format_number(2.955937825687224e-11).parse::<f64>().unwrap(), 2.955937825687224e-11);
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(round_sig(1.0 / 3.0, 12), 0.333333333333);
        assert_eq!(round_sig(0.0, 12), 0.0);
        assert_eq!(round_sig(123456.7891234567, 6), 123457.0);
    }
}
