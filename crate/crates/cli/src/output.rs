//! Deterministic text output: 12 significant digits, no non-finite numbers in
//! JSON, files or stdout.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::CliError;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// CSV field; non-finite values become empty fields.
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        let r = round_sig(x);
        // Avoid "-0".
        if r == 0.0 {
            "0".into()
        } else {
            r.to_string()
        }
    } else {
        String::new()
    }
}

fn round_tree(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            *value = n
                .as_f64()
                .and_then(|x| Number::from_f64(round_sig(x)))
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(round_tree),
        Value::Object(map) => map.values_mut().for_each(round_tree),
        _ => {}
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut tree = serde_json::to_value(value).expect("output types serialize to JSON");
    round_tree(&mut tree);
    let mut text = serde_json::to_string_pretty(&tree).expect("JSON values print");
    text.push('\n');
    text
}

/// Files go to `dir` when set; otherwise everything is printed to stdout.
pub struct Sink {
    pub dir: Option<PathBuf>,
}

impl Sink {
    pub fn to_stdout(&self) -> bool {
        self.dir.is_none()
    }

    pub fn emit(&self, name: &str, contents: &str) -> Result<(), CliError> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(name);
                std::fs::create_dir_all(dir)
                    .and_then(|_| std::fs::write(&path, contents))
                    .map_err(|source| CliError::Write {
                        path: path.display().to_string(),
                        source,
                    })
            }
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(contents.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|source| CliError::Write {
                        path: "stdout".into(),
                        source,
                    })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_twelve_digits() {
        assert_eq!(fmt_num(0.534574224327031), "0.534574224327");
        assert_eq!(fmt_num(6.675), "6.675");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(f64::NAN), "");
        assert_eq!(fmt_num(123456789012345.0), "123456789012000");
    }

    #[test]
    fn json_drops_non_finite() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: f64,
            n: u32,
        }
        let text = to_json(&S {
            a: f64::INFINITY,
            b: 1.0 / 3.0,
            n: 7,
        });
        assert_eq!(
            text,
            "{\n  \"a\": null,\n  \"b\": 0.333333333333,\n  \"n\": 7\n}\n"
        );
    }
}
