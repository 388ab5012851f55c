#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Command;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub struct Run {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the binary from the fixtures directory so paths in outputs are
/// stable.
pub fn pleo(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_pleo"))
        .args(args)
        .current_dir(fixture(""))
        .env_remove("PLEO_DEPTH")
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8"),
        stderr: String::from_utf8(out.stderr).expect("utf-8"),
    }
}

pub struct Golden {
    pub file: &'static str,
    pub args: &'static [&'static str],
    pub code: i32,
}

/// Every golden: the output file, the arguments, and the exit code.
pub const GOLDENS: &[Golden] = &[
    Golden { file: "nat_plus_one.eqs", args: &["deduce", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "one_plus_one.script", "--mode", "pleo-minimal"], code: 0 },
    Golden { file: "nat_plus_one_classic.eqs", args: &["deduce", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "one_plus_one.script", "--mode", "classic"], code: 0 },
    Golden { file: "deduce_pleo_minimal.json", args: &["deduce", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "one_plus_one.script", "--mode", "pleo-minimal", "--emit", "json"], code: 0 },
    Golden { file: "deduce_classic.json", args: &["deduce", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "one_plus_one.script", "--mode", "classic", "--emit", "json"], code: 0 },
    Golden { file: "deduce_cubes.dot", args: &["deduce", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "one_plus_one.script", "--mode", "pleo-minimal", "--emit", "dot"], code: 0 },
    Golden {
        file: "deduce_empty.eqs",
        args: &["deduce", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "empty.script"],
        code: 0,
    },
    Golden { file: "rewrite_del_edge_dpo.json", args: &["rewrite", "--mode", "dpo", "--rules", "del_edge.rules", "--graph", "cycle3.graph", "--emit", "json"], code: 0 },
    Golden { file: "rewrite_del_edge_dpo.txt", args: &["rewrite", "--mode", "dpo", "--rules", "del_edge.rules", "--graph", "cycle3.graph"], code: 0 },
    Golden { file: "rewrite_del_node_dpo.json", args: &["rewrite", "--mode", "dpo", "--rules", "del_node.rules", "--graph", "loop.graph", "--emit", "json"], code: 2 },
    Golden { file: "rewrite_del_node_sqpo.json", args: &["rewrite", "--mode", "sqpo", "--rules", "del_node.rules", "--graph", "loop.graph", "--emit", "json"], code: 0 },
    Golden { file: "rewrite_del_edge.dot", args: &["export", "rewrite", "--rules", "del_edge.rules", "--graph", "cycle3.graph"], code: 0 },
    Golden { file: "cycle3.dot", args: &["export", "graph", "cycle3.graph"], code: 0 },
    Golden { file: "verify_l1_inclusion.txt", args: &["verify", "pleo", "l1_inclusion.morph", "--depth", "2"], code: 0 },
    Golden { file: "verify_l1_inclusion.json", args: &["verify", "pleo", "l1_inclusion.morph", "--depth", "2", "--emit", "json"], code: 0 },
    Golden { file: "verify_corrupted_square.txt", args: &["verify", "pushout", "corrupted.square"], code: 2 },
    Golden { file: "verify_good_square.txt", args: &["verify", "pushout", "good.square"], code: 0 },
    Golden { file: "verify_cube.txt", args: &["verify", "cube", "nat_example.cube.json"], code: 0 },
    Golden {
        file: "nat_example.cube.json",
        args: &["export", "cube", "--spec", "nat.eqs", "--rules", "deduction.rules", "--script", "one_plus_one.script", "--mode", "pleo-minimal"],
        code: 0,
    },
];
