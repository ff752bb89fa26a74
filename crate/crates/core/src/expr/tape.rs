use super::{apply_bin, apply_func, integral_exponent, BinOp, EvalError, Expr, Func};

#[derive(Debug, Clone)]
enum Op {
    Const(f64),
    Slot(usize),
    Neg(usize),
    Bin(BinOp, usize, usize),
    PowI(usize, i32),
    Call(Func, usize),
}

/// Expression flattened into single-assignment instructions.
///
/// Each instruction writes one register and reads only earlier ones, so
/// evaluation is a single forward pass without recursion.
#[derive(Debug, Clone)]
pub struct Tape {
    ops: Vec<Op>,
    // source text of each instruction, for error locations
    sites: Vec<String>,
    max_slot: Option<usize>,
}

const INLINE_REGS: usize = 96;

impl Tape {
    pub(super) fn compile(e: &Expr) -> Tape {
        let mut t = Tape {
            ops: Vec::new(),
            sites: Vec::new(),
            max_slot: None,
        };
        t.emit(e);
        t
    }

    fn push(&mut self, op: Op, site: &Expr) -> usize {
        self.ops.push(op);
        let fallible = matches!(
            self.ops.last(),
            Some(Op::Bin(BinOp::Div | BinOp::Pow, ..) | Op::PowI(..) | Op::Call(Func::Ln, _))
        );
        self.sites
            .push(if fallible { site.to_string() } else { String::new() });
        self.ops.len() - 1
    }

    fn emit(&mut self, e: &Expr) -> usize {
        match e {
            Expr::Num(v) => self.push(Op::Const(*v), e),
            Expr::Var(v) => {
                self.max_slot = Some(self.max_slot.map_or(v.slot, |m| m.max(v.slot)));
                self.push(Op::Slot(v.slot), e)
            }
            Expr::Neg(a) => {
                let ra = self.emit(a);
                self.push(Op::Neg(ra), e)
            }
            Expr::Call(f, a) => {
                let ra = self.emit(a);
                self.push(Op::Call(*f, ra), e)
            }
            Expr::Bin(BinOp::Pow, a, b) => {
                let ra = self.emit(a);
                match b.as_num().and_then(integral_exponent) {
                    Some(n) => self.push(Op::PowI(ra, n), e),
                    None => {
                        let rb = self.emit(b);
                        self.push(Op::Bin(BinOp::Pow, ra, rb), e)
                    }
                }
            }
            Expr::Bin(op, a, b) => {
                let ra = self.emit(a);
                let rb = self.emit(b);
                self.push(Op::Bin(*op, ra, rb), e)
            }
        }
    }

    /// Number of slots the tape reads; `eval` needs at least this many.
    pub fn arity(&self) -> usize {
        self.max_slot.map_or(0, |m| m + 1)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn eval(&self, slots: &[f64]) -> Result<f64, EvalError> {
        if slots.len() < self.arity() {
            return Err(EvalError::Unbound(format!("slot {}", slots.len())));
        }
        if self.ops.len() <= INLINE_REGS {
            let mut regs = [0.0f64; INLINE_REGS];
            self.run(slots, &mut regs)
        } else {
            let mut regs = vec![0.0f64; self.ops.len()];
            self.run(slots, &mut regs)
        }
    }

    fn run(&self, slots: &[f64], regs: &mut [f64]) -> Result<f64, EvalError> {
        for (i, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(c) => c,
                Op::Slot(s) => slots[s],
                Op::Neg(a) => -regs[a],
                Op::Bin(BinOp::Add, a, b) => regs[a] + regs[b],
                Op::Bin(BinOp::Sub, a, b) => regs[a] - regs[b],
                Op::Bin(BinOp::Mul, a, b) => regs[a] * regs[b],
                Op::Bin(op, a, b) => {
                    apply_bin(op, regs[a], regs[b]).map_err(|f| f.locate(&self.sites[i]))?
                }
                Op::PowI(a, n) => {
                    if regs[a] == 0.0 && n < 0 {
                        return Err(super::Fault::DivZero.locate(&self.sites[i]));
                    }
                    regs[a].powi(n)
                }
                Op::Call(f, a) => apply_func(f, regs[a]).map_err(|e| e.locate(&self.sites[i]))?,
            };
            regs[i] = v;
        }
        Ok(regs[self.ops.len() - 1])
    }
}
