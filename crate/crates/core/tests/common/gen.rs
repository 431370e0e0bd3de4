//! Random well-typed MiniJ programs for property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random well-typed MiniJ source, with noisy formatting so the parser sees
/// more than canonical text.
pub struct Gen {
    rng: ChaCha8Rng,
    fresh: usize,
}

#[derive(Clone, Default)]
struct Scope {
    ints: Vec<String>,
    floats: Vec<String>,
    bools: Vec<String>,
}

impl Gen {
    pub fn new(seed: u64) -> Gen {
        Gen { rng: ChaCha8Rng::seed_from_u64(seed), fresh: 0 }
    }

    fn pick<'a>(&mut self, items: &'a [&'a str]) -> &'a str {
        items[self.rng.gen_range(0..items.len())]
    }

    fn ws(&mut self) -> &'static str {
        ["", " ", "  ", "\n", "\t"][self.rng.gen_range(0..5)]
    }

    fn wrap(&mut self, e: String) -> String {
        if self.rng.gen_bool(0.15) {
            format!("({}{e}{})", self.ws(), self.ws())
        } else {
            e
        }
    }

    fn int(&mut self, sc: &Scope, d: u32) -> String {
        let leaf = d == 0 || self.rng.gen_bool(0.3);
        let e = if leaf {
            match self.rng.gen_range(0..4) {
                0 => self.rng.gen_range(0..200).to_string(),
                1 if !sc.ints.is_empty() => sc.ints[self.rng.gen_range(0..sc.ints.len())].clone(),
                2 => "len(arr)".to_string(),
                _ => self.pick(&["a", "b", "g"]).to_string(),
            }
        } else {
            match self.rng.gen_range(0..7) {
                0 | 1 | 2 => {
                    let op = self.pick(&["+", "-", "*", "/", "%", "&", "|", "^", "<<", ">>"]);
                    format!("{} {op} {}", self.wrap_int(sc, d), self.wrap_int(sc, d))
                }
                3 => format!("-{}", self.paren_int(sc, d)),
                4 => format!("helper({}, {})", self.int(sc, d - 1), self.int(sc, d - 1)),
                5 => format!("arr[{}]", self.int(sc, d - 1)),
                _ => format!("(int) {}", self.paren_float(sc, d)),
            }
        };
        self.wrap(e)
    }

    fn wrap_int(&mut self, sc: &Scope, d: u32) -> String {
        let e = self.int(sc, d - 1);
        format!("({e})")
    }

    fn paren_int(&mut self, sc: &Scope, d: u32) -> String {
        format!("({})", self.int(sc, d - 1))
    }

    fn paren_float(&mut self, sc: &Scope, d: u32) -> String {
        format!("({})", self.float(sc, d - 1))
    }

    fn float(&mut self, sc: &Scope, d: u32) -> String {
        let leaf = d == 0 || self.rng.gen_bool(0.3);
        let e = if leaf {
            match self.rng.gen_range(0..3) {
                0 => self.pick(&["0.5", "1.25", "3.0", "100.0", "0.001"]).to_string(),
                1 if !sc.floats.is_empty() => sc.floats[self.rng.gen_range(0..sc.floats.len())].clone(),
                _ => "x".to_string(),
            }
        } else {
            match self.rng.gen_range(0..5) {
                0 | 1 => {
                    let op = self.pick(&["+", "-", "*", "/"]);
                    format!("({}) {op} ({})", self.float(sc, d - 1), self.float(sc, d - 1))
                }
                2 => format!("(float) {}", self.paren_int(sc, d)),
                3 => format!("fh({})", self.float(sc, d - 1)),
                _ => format!("-{}", self.paren_float(sc, d)),
            }
        };
        self.wrap(e)
    }

    fn bool(&mut self, sc: &Scope, d: u32) -> String {
        let leaf = d == 0 || self.rng.gen_bool(0.25);
        let e = if leaf {
            match self.rng.gen_range(0..3) {
                0 => self.pick(&["true", "false"]).to_string(),
                1 if !sc.bools.is_empty() => sc.bools[self.rng.gen_range(0..sc.bools.len())].clone(),
                _ => "c".to_string(),
            }
        } else {
            match self.rng.gen_range(0..6) {
                0 | 1 => {
                    let op = self.pick(&["<", "<=", ">", ">=", "==", "!="]);
                    format!("{} {op} {}", self.paren_int(sc, d), self.paren_int(sc, d))
                }
                2 => {
                    let op = self.pick(&["<", ">", "!="]);
                    format!("{} {op} {}", self.paren_float(sc, d), self.paren_float(sc, d))
                }
                3 => {
                    let op = self.pick(&["&&", "||"]);
                    format!("({}) {op} ({})", self.bool(sc, d - 1), self.bool(sc, d - 1))
                }
                4 => format!("!({})", self.bool(sc, d - 1)),
                _ => format!("ok({})", self.int(sc, d - 1)),
            }
        };
        self.wrap(e)
    }

    fn string(&mut self) -> String {
        self.pick(&["\"plain\"", "\"tab\\there\"", "\"q\\\"uote\"", "\"\"", "s", "s + \"!\""]).to_string()
    }

    fn name(&mut self, prefix: &str) -> String {
        self.fresh += 1;
        format!("{prefix}{}", self.fresh)
    }

    fn block(&mut self, sc: &Scope, d: u32, out: &mut String) {
        let mut sc = sc.clone();
        let n = self.rng.gen_range(0..4);
        for _ in 0..n {
            self.stmt(&mut sc, d, out);
        }
    }

    fn stmt(&mut self, sc: &mut Scope, d: u32, out: &mut String) {
        let ws = self.ws();
        out.push_str(ws);
        let nested = d > 0 && self.rng.gen_bool(0.35);
        if nested {
            match self.rng.gen_range(0..5) {
                0 => {
                    let c = self.bool(sc, 2);
                    out.push_str(&format!("if ({c}) {{\n"));
                    self.block(sc, d - 1, out);
                    out.push('}');
                    match self.rng.gen_range(0..3) {
                        0 => {}
                        1 => {
                            out.push_str(" else {\n");
                            self.block(sc, d - 1, out);
                            out.push('}');
                        }
                        _ => {
                            let c = self.bool(sc, 1);
                            out.push_str(&format!(" else if ({c}) {{\n"));
                            self.block(sc, d - 1, out);
                            out.push('}');
                        }
                    }
                }
                1 => {
                    let c = self.bool(sc, 2);
                    out.push_str(&format!("while ({c}) {{ "));
                    self.block(sc, d - 1, out);
                    out.push('}');
                }
                2 => {
                    let e = self.name("e");
                    out.push_str("try {\n");
                    self.block(sc, d - 1, out);
                    out.push_str(&format!("}} catch ({e}) {{ print({e}); "));
                    self.block(sc, d - 1, out);
                    out.push('}');
                }
                3 => {
                    out.push('{');
                    self.block(sc, d - 1, out);
                    out.push('}');
                }
                _ => {
                    let c = self.bool(sc, 1);
                    let msg = self.string();
                    out.push_str(&format!("if ({c}) {{ throw {msg}; }}"));
                }
            }
            out.push('\n');
            return;
        }
        let line = match self.rng.gen_range(0..12) {
            0 => {
                let v = self.name("i");
                let line = format!("int {v} = {};", self.int(sc, 3));
                sc.ints.push(v);
                line
            }
            1 => {
                let v = self.name("f");
                let line = format!("float {v} = {};", self.float(sc, 2));
                sc.floats.push(v);
                line
            }
            2 => {
                let v = self.name("p");
                let line = format!("bool {v} = {};", self.bool(sc, 2));
                sc.bools.push(v);
                line
            }
            3 => {
                let op = self.pick(&["=", "+=", "-=", "*=", "/="]);
                let t = self.pick(&["a", "b"]);
                format!("{t} {op} {};", self.int(sc, 3))
            }
            4 => format!("x = {};", self.float(sc, 2)),
            5 => format!("arr[{}] = {};", self.int(sc, 1), self.int(sc, 2)),
            6 => self.pick(&["a++;", "b--;", "++a;", "--b;", "g++;"]).to_string(),
            7 => format!("print({});", self.int(sc, 2)),
            8 => format!("c = {};", self.bool(sc, 2)),
            9 => format!("s = {};", self.string()),
            10 => ";".to_string(),
            _ => "// a comment\nprint(s);".to_string(),
        };
        out.push_str(&line);
        out.push('\n');
    }

    pub fn program(&mut self) -> String {
        let mut out = String::from(
            "int g = 7;\n\
             int helper(int p, int q) { return p * q + 1; }\n\
             float fh(float v) { return v / 2.0; }\n\
             bool ok(int n) { return n > 0; }\n",
        );
        let sc = Scope::default();
        out.push_str("int f(int a, int b, float x, bool c, string s, int[] arr) {\n");
        self.block(&sc, 2, &mut out);
        let r = self.int(&sc, 3);
        out.push_str(&format!("return {r};\n}}\n"));
        out.push_str("float h(int a, int b, float x, bool c, string s, int[] arr) {\n");
        self.block(&sc, 2, &mut out);
        let r = self.float(&sc, 2);
        out.push_str(&format!("return {r};\n}}\n"));
        let (a, b) = (self.rng.gen_range(-5..20), self.rng.gen_range(-5..20));
        out.push_str(&format!(
            "void test_gen() {{\n    int[] arr = new int[4];\n    int r = f({a}, {b}, 1.5, true, \"s\", arr);\n    \
             float q = h({b}, {a}, 0.5, false, \"t\", arr);\n    assert(r != 12345);\n}}\n"
        ));
        out
    }
}
