#![allow(dead_code)]

use std::process::Command;

use serde_json::Value;

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Run {
    pub fn json(&self) -> Value {
        serde_json::from_str(&self.stdout)
            .unwrap_or_else(|e| panic!("bad JSON ({e}): {}\n{}", self.stdout, self.stderr))
    }
}

pub fn yb_lab(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_yb-lab"))
        .args(args)
        .output()
        .expect("spawn yb-lab");
    Run {
        code: out.status.code().expect("exited normally"),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Report text with the timing field removed.
pub fn without_wall(v: &Value) -> Value {
    let mut v = v.clone();
    v.as_object_mut().unwrap().remove("wall_ms");
    v
}
