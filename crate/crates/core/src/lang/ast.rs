use std::fmt;
use std::sync::Arc;

/// A 1-based line/column position inside one source file.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl Pos {
    pub fn new(line: u32, col: u32) -> Self {
        Pos { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A position qualified with the file it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SourceLocation {
    pub file: Arc<str>,
    pub line: u32,
    pub column: u32,
}

impl SourceLocation {
    pub fn new(file: &Arc<str>, pos: Pos) -> Self {
        SourceLocation {
            file: file.clone(),
            line: pos.line.max(1),
            column: pos.col.max(1),
        }
    }

    pub fn pos(&self) -> Pos {
        Pos::new(self.line, self.column)
    }
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub file: Arc<str>,
    pub body: Vec<Stmt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeclKind {
    Var,
    Let,
}

impl DeclKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DeclKind::Var => "var",
            DeclKind::Let => "let",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    VarDecl {
        kind: DeclKind,
        name: String,
        init: Expr,
    },
    /// `target = value;` where target is an identifier or a property access.
    Assign {
        target: Expr,
        value: Expr,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then_branch: Vec<Stmt>,
        else_branch: Option<Vec<Stmt>>,
    },
    While {
        cond: Expr,
        body: Vec<Stmt>,
    },
    For {
        init: Box<Stmt>,
        cond: Expr,
        update: Box<Stmt>,
        body: Vec<Stmt>,
    },
    /// `for (let k in obj) { ... }`
    ForIn {
        decl: Option<DeclKind>,
        var: String,
        var_pos: Pos,
        object: Expr,
        body: Vec<Stmt>,
    },
    Function(Arc<Function>),
    Return(Option<Expr>),
    Block(Vec<Stmt>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: Option<String>,
    pub params: Vec<String>,
    pub body: Vec<Stmt>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    /// Start of the expression, except for property accesses (position of the
    /// property name or `[`) and calls (position of `(`).
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Property {
    Static(String),
    Dynamic(Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Rem,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    And,
    Or,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::And => "&&",
            BinaryOp::Or => "||",
        }
    }

    pub(crate) fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 4,
            BinaryOp::Add | BinaryOp::Sub => 5,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
    /// `delete a.b` removes a field; it is a write on the field.
    Delete,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprKind {
    Ident(String),
    Num(f64),
    Str(String),
    Bool(bool),
    Null,
    Member {
        object: Box<Expr>,
        property: Property,
    },
    Call {
        callee: Box<Expr>,
        args: Vec<Expr>,
    },
    Function(Arc<Function>),
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Object(Vec<(String, Expr)>),
    /// `require(arg)`; `require` is still resolved through normal scoping.
    Import {
        arg: Box<Expr>,
    },
    /// `eval(arg)`; `eval` is still resolved through normal scoping.
    Eval {
        arg: Box<Expr>,
    },
}

impl Expr {
    pub fn new(kind: ExprKind, pos: Pos) -> Self {
        Expr { kind, pos }
    }

    /// The literal module name of `require("m")`, if the argument is a string
    /// literal.
    pub fn import_literal(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Import { arg } => match &arg.kind {
                ExprKind::Str(s) => Some(s),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn is_dynamic_access(&self) -> bool {
        matches!(
            &self.kind,
            ExprKind::Member {
                property: Property::Dynamic(_),
                ..
            }
        )
    }

    /// Visit this expression and every sub-expression (not descending into
    /// nested function bodies).
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a Expr)) {
        f(self);
        match &self.kind {
            ExprKind::Member { object, property } => {
                object.walk(f);
                if let Property::Dynamic(p) = property {
                    p.walk(f);
                }
            }
            ExprKind::Call { callee, args } => {
                callee.walk(f);
                for a in args {
                    a.walk(f);
                }
            }
            ExprKind::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
            ExprKind::Unary { operand, .. } => operand.walk(f),
            ExprKind::Object(fields) => {
                for (_, v) in fields {
                    v.walk(f);
                }
            }
            ExprKind::Import { arg } | ExprKind::Eval { arg } => arg.walk(f),
            ExprKind::Ident(_)
            | ExprKind::Num(_)
            | ExprKind::Str(_)
            | ExprKind::Bool(_)
            | ExprKind::Null
            | ExprKind::Function(_) => {}
        }
    }
}

impl Program {
    /// A copy with every position zeroed, for structural comparison.
    pub fn without_positions(&self) -> Program {
        Program {
            file: self.file.clone(),
            body: self.body.iter().map(strip_stmt).collect(),
        }
    }

    /// Every statement in the program, including nested function bodies.
    pub fn all_statements(&self) -> Vec<&Stmt> {
        let mut out = Vec::new();
        for s in &self.body {
            collect_stmts(s, &mut out);
        }
        out
    }
}

fn collect_stmts<'a>(s: &'a Stmt, out: &mut Vec<&'a Stmt>) {
    out.push(s);
    for child in s.child_blocks() {
        for c in child {
            collect_stmts(c, out);
        }
    }
    if let StmtKind::Function(f) = &s.kind {
        for c in &f.body {
            collect_stmts(c, out);
        }
    }
    for e in s.own_exprs() {
        collect_fn_bodies(e, out);
    }
}

fn collect_fn_bodies<'a>(e: &'a Expr, out: &mut Vec<&'a Stmt>) {
    e.walk(&mut |sub| {
        if let ExprKind::Function(f) = &sub.kind {
            for c in &f.body {
                collect_stmts(c, out);
            }
        }
    });
}

impl Stmt {
    /// Expressions evaluated directly by this statement (not its child blocks).
    pub fn own_exprs(&self) -> Vec<&Expr> {
        match &self.kind {
            StmtKind::VarDecl { init, .. } => vec![init],
            StmtKind::Assign { target, value } => vec![target, value],
            StmtKind::Expr(e) => vec![e],
            StmtKind::If { cond, .. } | StmtKind::While { cond, .. } => vec![cond],
            StmtKind::For { init, cond, update, .. } => {
                let mut v = init.own_exprs();
                v.push(cond);
                v.extend(update.own_exprs());
                v
            }
            StmtKind::ForIn { object, .. } => vec![object],
            StmtKind::Return(Some(e)) => vec![e],
            StmtKind::Return(None) | StmtKind::Function(_) | StmtKind::Block(_) => vec![],
        }
    }

    pub fn child_blocks(&self) -> Vec<&Vec<Stmt>> {
        match &self.kind {
            StmtKind::If {
                then_branch,
                else_branch,
                ..
            } => {
                let mut v = vec![then_branch];
                if let Some(e) = else_branch {
                    v.push(e);
                }
                v
            }
            StmtKind::While { body, .. }
            | StmtKind::For { body, .. }
            | StmtKind::ForIn { body, .. }
            | StmtKind::Block(body) => vec![body],
            _ => vec![],
        }
    }
}

fn strip_stmts(v: &[Stmt]) -> Vec<Stmt> {
    v.iter().map(strip_stmt).collect()
}

fn strip_fn(f: &Function) -> Arc<Function> {
    Arc::new(Function {
        name: f.name.clone(),
        params: f.params.clone(),
        body: strip_stmts(&f.body),
        pos: Pos::default(),
    })
}

fn strip_stmt(s: &Stmt) -> Stmt {
    let kind = match &s.kind {
        StmtKind::VarDecl { kind, name, init } => StmtKind::VarDecl {
            kind: *kind,
            name: name.clone(),
            init: strip_expr(init),
        },
        StmtKind::Assign { target, value } => StmtKind::Assign {
            target: strip_expr(target),
            value: strip_expr(value),
        },
        StmtKind::Expr(e) => StmtKind::Expr(strip_expr(e)),
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => StmtKind::If {
            cond: strip_expr(cond),
            then_branch: strip_stmts(then_branch),
            else_branch: else_branch.as_ref().map(|b| strip_stmts(b)),
        },
        StmtKind::While { cond, body } => StmtKind::While {
            cond: strip_expr(cond),
            body: strip_stmts(body),
        },
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => StmtKind::For {
            init: Box::new(strip_stmt(init)),
            cond: strip_expr(cond),
            update: Box::new(strip_stmt(update)),
            body: strip_stmts(body),
        },
        StmtKind::ForIn {
            decl,
            var,
            object,
            body,
            ..
        } => StmtKind::ForIn {
            decl: *decl,
            var: var.clone(),
            var_pos: Pos::default(),
            object: strip_expr(object),
            body: strip_stmts(body),
        },
        StmtKind::Function(f) => StmtKind::Function(strip_fn(f)),
        StmtKind::Return(e) => StmtKind::Return(e.as_ref().map(strip_expr)),
        StmtKind::Block(b) => StmtKind::Block(strip_stmts(b)),
    };
    Stmt {
        kind,
        pos: Pos::default(),
    }
}

fn strip_expr(e: &Expr) -> Expr {
    let kind = match &e.kind {
        ExprKind::Member { object, property } => ExprKind::Member {
            object: Box::new(strip_expr(object)),
            property: match property {
                Property::Static(s) => Property::Static(s.clone()),
                Property::Dynamic(p) => Property::Dynamic(Box::new(strip_expr(p))),
            },
        },
        ExprKind::Call { callee, args } => ExprKind::Call {
            callee: Box::new(strip_expr(callee)),
            args: args.iter().map(strip_expr).collect(),
        },
        ExprKind::Function(f) => ExprKind::Function(strip_fn(f)),
        ExprKind::Binary { op, lhs, rhs } => ExprKind::Binary {
            op: *op,
            lhs: Box::new(strip_expr(lhs)),
            rhs: Box::new(strip_expr(rhs)),
        },
        ExprKind::Unary { op, operand } => ExprKind::Unary {
            op: *op,
            operand: Box::new(strip_expr(operand)),
        },
        ExprKind::Object(fields) => ExprKind::Object(
            fields
                .iter()
                .map(|(k, v)| (k.clone(), strip_expr(v)))
                .collect(),
        ),
        ExprKind::Import { arg } => ExprKind::Import {
            arg: Box::new(strip_expr(arg)),
        },
        ExprKind::Eval { arg } => ExprKind::Eval {
            arg: Box::new(strip_expr(arg)),
        },
        other => other.clone(),
    };
    Expr {
        kind,
        pos: Pos::default(),
    }
}
