//! Deterministic tree-walking interpreter and `test_*` runner.

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use super::ast::*;
use super::{ExecutionError, Program};

pub const DEFAULT_MAX_STEPS: u64 = 1_000_000;

/// Nested calls deeper than this abort the test with an error, the way a
/// JVM stack overflow would.
pub const MAX_CALL_DEPTH: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepBudget {
    pub max_steps: u64,
}

impl Default for StepBudget {
    fn default() -> Self {
        StepBudget { max_steps: DEFAULT_MAX_STEPS }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    FailAssert,
    FailError,
    FailTimeout,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub test_name: String,
    pub outcome: Outcome,
    /// Interpreter steps taken, including global initialization.
    pub steps: u64,
}

impl TestVerdict {
    pub fn passed(&self) -> bool {
        self.outcome == Outcome::Pass
    }
}

#[derive(Clone, Debug)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(Rc<str>),
    Array(Rc<RefCell<Vec<Value>>>),
    Void,
}

impl Value {
    fn as_int(&self) -> i64 {
        match self {
            Value::Int(v) => *v,
            Value::Float(v) => *v as i64,
            _ => 0,
        }
    }

    fn as_float(&self) -> f64 {
        match self {
            Value::Int(v) => *v as f64,
            Value::Float(v) => *v,
            _ => 0.0,
        }
    }

    fn as_bool(&self) -> bool {
        matches!(self, Value::Bool(true))
    }

    fn display(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Float(v) => super::unparse::format_float(*v),
            Value::Bool(b) => b.to_string(),
            Value::Str(s) => s.to_string(),
            Value::Array(a) => {
                let parts: Vec<String> = a.borrow().iter().map(Value::display).collect();
                format!("[{}]", parts.join(", "))
            }
            Value::Void => "void".into(),
        }
    }

    fn default_for(ty: &Type) -> Value {
        match ty {
            Type::Int => Value::Int(0),
            Type::Float => Value::Float(0.0),
            Type::Bool => Value::Bool(false),
            Type::Str => Value::Str(Rc::from("")),
            Type::Array(_) => Value::Array(Rc::new(RefCell::new(Vec::new()))),
            Type::Void => Value::Void,
        }
    }
}

/// Non-local exits.
enum Abort {
    /// `throw` or a runtime fault; catchable by `try`.
    Throw(String),
    Assert,
    Timeout,
    /// Uncatchable error (stack exhaustion).
    Fatal,
    Internal(String),
}

enum Flow {
    Normal,
    Return(Value),
}

type Exec<T> = Result<T, Abort>;

struct Frame {
    scopes: Vec<HashMap<String, Value>>,
}

struct Machine<'p> {
    functions: HashMap<(&'p str, usize), &'p Function>,
    globals: HashMap<String, Value>,
    frames: Vec<Frame>,
    steps: u64,
    max_steps: u64,
    output: Vec<String>,
}

/// Runs the selected `test_*` functions (all of them when `selection` is
/// `None`), each against freshly initialized globals.
pub fn run_tests(
    program: &Program,
    selection: Option<&[String]>,
    budget: StepBudget,
) -> Result<Vec<TestVerdict>, ExecutionError> {
    let tests = program.test_names();
    let chosen: Vec<String> = match selection {
        None => tests,
        Some(sel) => {
            for name in sel {
                if !tests.contains(name) {
                    return Err(ExecutionError::UnknownTest(name.clone()));
                }
            }
            sel.to_vec()
        }
    };
    on_interpreter_stack(|| chosen.iter().map(|t| run_one(program, t, budget)).collect())
}

/// Runs each named test under its own step budget.
pub fn run_tests_budgeted(
    program: &Program,
    tests: &[(String, StepBudget)],
) -> Result<Vec<TestVerdict>, ExecutionError> {
    on_interpreter_stack(|| tests.iter().map(|(t, b)| run_one(program, t, *b)).collect())
}

pub fn run_test(program: &Program, name: &str, budget: StepBudget) -> Result<TestVerdict, ExecutionError> {
    on_interpreter_stack(|| run_one(program, name, budget))
}

/// Stack for the interpreter thread; deep MiniJ recursion up to
/// `MAX_CALL_DEPTH` needs far more than a default test-harness thread has.
const INTERPRETER_STACK: usize = 256 << 20;

fn on_interpreter_stack<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    std::thread::scope(|s| {
        std::thread::Builder::new()
            .name("minij".into())
            .stack_size(INTERPRETER_STACK)
            .spawn_scoped(s, f)
            .expect("spawn interpreter thread")
            .join()
            .expect("interpreter thread panicked")
    })
}

fn run_one(program: &Program, name: &str, budget: StepBudget) -> Result<TestVerdict, ExecutionError> {
    let mut m = Machine::new(program, budget);
    let outcome = m.run_test(program, name)?;
    Ok(TestVerdict { test_name: name.to_string(), outcome, steps: m.steps })
}

impl<'p> Machine<'p> {
    fn new(program: &'p Program, budget: StepBudget) -> Machine<'p> {
        let mut functions = HashMap::new();
        for su in &program.units {
            for f in su.unit.functions() {
                functions.insert((f.name.as_str(), f.params.len()), f);
            }
        }
        Machine {
            functions,
            globals: HashMap::new(),
            frames: Vec::new(),
            steps: 0,
            max_steps: budget.max_steps,
            output: Vec::new(),
        }
    }

    fn run_test(&mut self, program: &'p Program, name: &str) -> Result<Outcome, ExecutionError> {
        let Some(f) = self.functions.get(&(name, 0)).copied() else {
            return Err(ExecutionError::UnknownTest(name.to_string()));
        };
        let result = self.init_globals(program).and_then(|()| self.call(f, Vec::new()));
        match result {
            Ok(_) => Ok(Outcome::Pass),
            Err(Abort::Assert) => Ok(Outcome::FailAssert),
            Err(Abort::Throw(_)) | Err(Abort::Fatal) => Ok(Outcome::FailError),
            Err(Abort::Timeout) => Ok(Outcome::FailTimeout),
            Err(Abort::Internal(msg)) => Err(ExecutionError::Internal(msg)),
        }
    }

    fn init_globals(&mut self, program: &'p Program) -> Exec<()> {
        self.frames.push(Frame { scopes: vec![HashMap::new()] });
        for su in &program.units {
            for g in su.unit.globals() {
                let v = match &g.init {
                    Some(e) => {
                        let v = self.eval(e)?;
                        coerce(v, &g.ty)
                    }
                    None => Value::default_for(&g.ty),
                };
                self.globals.insert(g.name.clone(), v);
            }
        }
        self.frames.pop();
        Ok(())
    }

    fn tick(&mut self) -> Exec<()> {
        self.steps += 1;
        if self.steps > self.max_steps {
            Err(Abort::Timeout)
        } else {
            Ok(())
        }
    }

    fn call(&mut self, f: &'p Function, args: Vec<Value>) -> Exec<Value> {
        self.tick()?;
        if self.frames.len() >= MAX_CALL_DEPTH {
            return Err(Abort::Fatal);
        }
        let scope = f
            .params
            .iter()
            .zip(args)
            .map(|(p, v)| (p.name.clone(), coerce(v, &p.ty)))
            .collect();
        self.frames.push(Frame { scopes: vec![scope] });
        let result = self.block(&f.body, false);
        self.frames.pop();
        match result? {
            Flow::Return(v) => Ok(coerce(v, &f.ret)),
            Flow::Normal => Ok(Value::Void),
        }
    }

    fn frame(&mut self) -> &mut Frame {
        self.frames.last_mut().expect("active frame")
    }

    fn block(&mut self, block: &'p Block, new_scope: bool) -> Exec<Flow> {
        if new_scope {
            self.frame().scopes.push(HashMap::new());
        }
        let mut flow = Ok(Flow::Normal);
        for s in &block.stmts {
            match self.stmt(s) {
                Ok(Flow::Normal) => {}
                other => {
                    flow = other;
                    break;
                }
            }
        }
        if new_scope {
            self.frame().scopes.pop();
        }
        flow
    }

    fn stmt(&mut self, stmt: &'p Stmt) -> Exec<Flow> {
        self.tick()?;
        match &stmt.kind {
            StmtKind::Decl { ty, name, init } => {
                let v = match init {
                    Some(e) => coerce(self.eval(e)?, ty),
                    None => Value::default_for(ty),
                };
                self.frame().scopes.last_mut().expect("scope").insert(name.clone(), v);
            }
            StmtKind::Assign { target, op, value } => {
                let rhs = self.eval(value)?;
                let ty = target.ty.clone();
                let new = match op.binary() {
                    None => rhs,
                    Some(bop) => {
                        let cur = self.eval(target)?;
                        binary(bop, cur, rhs)?
                    }
                };
                let new = match &ty {
                    Some(t) => coerce(new, t),
                    None => new,
                };
                self.store(target, new)?;
            }
            StmtKind::Expr(e) => {
                self.eval(e)?;
            }
            StmtKind::If { cond, then_block, else_block } => {
                if self.eval(cond)?.as_bool() {
                    return self.block(then_block, true);
                } else if let Some(e) = else_block {
                    return self.block(e, true);
                }
            }
            StmtKind::While { cond, body } => loop {
                self.tick()?;
                if !self.eval(cond)?.as_bool() {
                    break;
                }
                if let Flow::Return(v) = self.block(body, true)? {
                    return Ok(Flow::Return(v));
                }
            },
            StmtKind::Return(e) => {
                let v = match e {
                    Some(e) => self.eval(e)?,
                    None => Value::Void,
                };
                return Ok(Flow::Return(v));
            }
            StmtKind::Throw(e) => {
                let v = self.eval(e)?;
                return Err(Abort::Throw(v.display()));
            }
            StmtKind::Try { body, binding, handler } => {
                let depth = self.frame().scopes.len();
                match self.block(body, true) {
                    Err(Abort::Throw(msg)) => {
                        self.frame().scopes.truncate(depth);
                        let mut scope = HashMap::new();
                        scope.insert(binding.clone(), Value::Str(Rc::from(msg.as_str())));
                        self.frame().scopes.push(scope);
                        let r = self.block(handler, false);
                        self.frame().scopes.pop();
                        return r;
                    }
                    other => return other,
                }
            }
            StmtKind::Block(b) => return self.block(b, true),
            StmtKind::Empty => {}
        }
        Ok(Flow::Normal)
    }

    fn lookup(&self, name: &str) -> Exec<Value> {
        let frame = self.frames.last().expect("active frame");
        for scope in frame.scopes.iter().rev() {
            if let Some(v) = scope.get(name) {
                return Ok(v.clone());
            }
        }
        self.globals
            .get(name)
            .cloned()
            .ok_or_else(|| Abort::Internal(format!("unbound variable '{name}'")))
    }

    fn store(&mut self, target: &'p Expr, v: Value) -> Exec<()> {
        match &target.kind {
            ExprKind::Var(name) => {
                let frame = self.frames.last_mut().expect("active frame");
                for scope in frame.scopes.iter_mut().rev() {
                    if let Some(slot) = scope.get_mut(name) {
                        *slot = v;
                        return Ok(());
                    }
                }
                match self.globals.get_mut(name) {
                    Some(slot) => {
                        *slot = v;
                        Ok(())
                    }
                    None => Err(Abort::Internal(format!("unbound variable '{name}'"))),
                }
            }
            ExprKind::Index { array, index } => {
                let arr = self.eval(array)?;
                let i = self.eval(index)?.as_int();
                let Value::Array(cells) = arr else {
                    return Err(Abort::Internal("indexing a non-array".into()));
                };
                let mut cells = cells.borrow_mut();
                let len = cells.len();
                let slot = usize::try_from(i)
                    .ok()
                    .and_then(|i| cells.get_mut(i))
                    .ok_or_else(|| Abort::Throw(format!("index {i} out of bounds for length {len}")))?;
                *slot = v;
                Ok(())
            }
            _ => Err(Abort::Internal("assignment to a non-lvalue".into())),
        }
    }

    fn eval(&mut self, e: &'p Expr) -> Exec<Value> {
        Ok(match &e.kind {
            ExprKind::Int(v) => Value::Int(*v),
            ExprKind::Float(v) => Value::Float(*v),
            ExprKind::Bool(b) => Value::Bool(*b),
            ExprKind::Str(s) => Value::Str(Rc::from(s.as_str())),
            ExprKind::Var(name) => self.lookup(name)?,
            ExprKind::Index { array, index } => {
                let arr = self.eval(array)?;
                let i = self.eval(index)?.as_int();
                let Value::Array(cells) = arr else {
                    return Err(Abort::Internal("indexing a non-array".into()));
                };
                let cells = cells.borrow();
                usize::try_from(i)
                    .ok()
                    .and_then(|i| cells.get(i).cloned())
                    .ok_or_else(|| Abort::Throw(format!("index {i} out of bounds for length {}", cells.len())))?
            }
            ExprKind::Unary { op, operand } => {
                let v = self.eval(operand)?;
                match (op, v) {
                    (UnaryOp::Neg, Value::Int(x)) => Value::Int(x.wrapping_neg()),
                    (UnaryOp::Neg, Value::Float(x)) => Value::Float(-x),
                    (UnaryOp::Not, Value::Bool(b)) => Value::Bool(!b),
                    _ => return Err(Abort::Internal("ill-typed unary operand".into())),
                }
            }
            ExprKind::IncDec { op, target } => {
                let old = self.eval(target)?;
                let delta = if op.is_increment() { 1 } else { -1 };
                let new = match &old {
                    Value::Int(x) => Value::Int(x.wrapping_add(delta)),
                    Value::Float(x) => Value::Float(x + delta as f64),
                    _ => return Err(Abort::Internal("ill-typed increment".into())),
                };
                self.store(target, new.clone())?;
                if op.is_prefix() {
                    new
                } else {
                    old
                }
            }
            ExprKind::Binary { op: BinOp::And, lhs, rhs } => {
                Value::Bool(self.eval(lhs)?.as_bool() && self.eval(rhs)?.as_bool())
            }
            ExprKind::Binary { op: BinOp::Or, lhs, rhs } => {
                Value::Bool(self.eval(lhs)?.as_bool() || self.eval(rhs)?.as_bool())
            }
            ExprKind::Binary { op, lhs, rhs } => {
                let l = self.eval(lhs)?;
                let r = self.eval(rhs)?;
                binary(*op, l, r)?
            }
            ExprKind::Cast { ty, expr } => coerce_cast(self.eval(expr)?, ty),
            ExprKind::Call { name, args } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a)?);
                }
                match (name.as_str(), vals.as_slice()) {
                    ("assert", [v]) => {
                        if !v.as_bool() {
                            return Err(Abort::Assert);
                        }
                        Value::Void
                    }
                    ("print", [v]) => {
                        let s = v.display();
                        self.output.push(s);
                        Value::Void
                    }
                    ("len", [Value::Array(a)]) => Value::Int(a.borrow().len() as i64),
                    ("len", [Value::Str(s)]) => Value::Int(s.chars().count() as i64),
                    _ => {
                        let f = self
                            .functions
                            .get(&(name.as_str(), vals.len()))
                            .copied()
                            .ok_or_else(|| Abort::Internal(format!("unknown function '{name}'")))?;
                        self.call(f, vals)?
                    }
                }
            }
            ExprKind::NewArray { elem, len } => {
                let n = self.eval(len)?.as_int();
                if n < 0 {
                    return Err(Abort::Throw(format!("negative array size {n}")));
                }
                if n > 1_000_000 {
                    return Err(Abort::Fatal);
                }
                self.steps += n as u64 / 64;
                Value::Array(Rc::new(RefCell::new(vec![Value::default_for(elem); n as usize])))
            }
            ExprKind::ArrayLit(elems) => {
                let elem_ty = match &e.ty {
                    Some(Type::Array(t)) => Some((**t).clone()),
                    _ => None,
                };
                let mut vals = Vec::with_capacity(elems.len());
                for el in elems {
                    let v = self.eval(el)?;
                    vals.push(match &elem_ty {
                        Some(t) => coerce(v, t),
                        None => v,
                    });
                }
                Value::Array(Rc::new(RefCell::new(vals)))
            }
        })
    }
}

/// Implicit widening of int values into float slots.
fn coerce(v: Value, ty: &Type) -> Value {
    match (v, ty) {
        (Value::Int(x), Type::Float) => Value::Float(x as f64),
        (v, _) => v,
    }
}

fn coerce_cast(v: Value, ty: &Type) -> Value {
    match ty {
        Type::Int => Value::Int(match v {
            // Saturating, NaN to zero: the JVM's d2l.
            Value::Float(x) => x as i64,
            other => other.as_int(),
        }),
        Type::Float => Value::Float(v.as_float()),
        _ => v,
    }
}

fn binary(op: BinOp, l: Value, r: Value) -> Exec<Value> {
    use Value::*;
    Ok(match (op, l, r) {
        (BinOp::Add, Str(a), Str(b)) => Str(Rc::from(format!("{a}{b}").as_str())),
        (BinOp::Eq, Str(a), Str(b)) => Bool(a == b),
        (BinOp::Ne, Str(a), Str(b)) => Bool(a != b),
        (BinOp::Eq, Bool(a), Bool(b)) => Bool(a == b),
        (BinOp::Ne, Bool(a), Bool(b)) => Bool(a != b),
        (op, Int(a), Int(b)) => match op {
            BinOp::Add => Int(a.wrapping_add(b)),
            BinOp::Sub => Int(a.wrapping_sub(b)),
            BinOp::Mul => Int(a.wrapping_mul(b)),
            BinOp::Div | BinOp::Rem if b == 0 => return Err(Abort::Throw("/ by zero".into())),
            BinOp::Div => Int(a.wrapping_div(b)),
            BinOp::Rem => Int(a.wrapping_rem(b)),
            BinOp::Lt => Bool(a < b),
            BinOp::Le => Bool(a <= b),
            BinOp::Gt => Bool(a > b),
            BinOp::Ge => Bool(a >= b),
            BinOp::Eq => Bool(a == b),
            BinOp::Ne => Bool(a != b),
            BinOp::BitAnd => Int(a & b),
            BinOp::BitOr => Int(a | b),
            BinOp::BitXor => Int(a ^ b),
            BinOp::Shl => Int(a.wrapping_shl((b & 63) as u32)),
            BinOp::Shr => Int(a.wrapping_shr((b & 63) as u32)),
            BinOp::And | BinOp::Or => return Err(Abort::Internal("logical operator on ints".into())),
        },
        (op, l @ (Int(_) | Float(_)), r @ (Int(_) | Float(_))) => {
            let (a, b) = (l.as_float(), r.as_float());
            match op {
                BinOp::Add => Float(a + b),
                BinOp::Sub => Float(a - b),
                BinOp::Mul => Float(a * b),
                BinOp::Div => Float(a / b),
                BinOp::Rem => Float(a % b),
                BinOp::Lt => Bool(a < b),
                BinOp::Le => Bool(a <= b),
                BinOp::Gt => Bool(a > b),
                BinOp::Ge => Bool(a >= b),
                BinOp::Eq => Bool(a == b),
                BinOp::Ne => Bool(a != b),
                _ => return Err(Abort::Internal("ill-typed float operation".into())),
            }
        }
        _ => return Err(Abort::Internal("ill-typed binary operation".into())),
    })
}
