use std::fmt::Write;

use super::ast::*;

/// Render a program back to source text that reparses to the same AST
/// (modulo positions).
pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    for s in &program.body {
        stmt(&mut out, s, 0);
    }
    out
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e);
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn block(out: &mut String, body: &[Stmt], level: usize) {
    out.push_str("{\n");
    for s in body {
        stmt(out, s, level + 1);
    }
    indent(out, level);
    out.push('}');
}

fn simple(out: &mut String, s: &Stmt) {
    match &s.kind {
        StmtKind::VarDecl { kind, name, init } => {
            let _ = write!(out, "{} {} = ", kind.keyword(), name);
            expr(out, init);
        }
        StmtKind::Assign { target, value } => {
            expr(out, target);
            out.push_str(" = ");
            expr(out, value);
        }
        StmtKind::Expr(e) => {
            if starts_with_brace(e) {
                out.push('(');
                expr(out, e);
                out.push(')');
            } else {
                expr(out, e);
            }
        }
        _ => unreachable!("only simple statements appear in for headers"),
    }
}

fn starts_with_brace(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Object(_) => true,
        ExprKind::Member { object, .. } => starts_with_brace(object),
        ExprKind::Call { callee, .. } => starts_with_brace(callee),
        ExprKind::Binary { lhs, .. } => starts_with_brace(lhs),
        _ => false,
    }
}

fn stmt(out: &mut String, s: &Stmt, level: usize) {
    indent(out, level);
    match &s.kind {
        StmtKind::VarDecl { .. } | StmtKind::Assign { .. } | StmtKind::Expr(_) => {
            simple(out, s);
            out.push(';');
        }
        StmtKind::If {
            cond,
            then_branch,
            else_branch,
        } => {
            out.push_str("if (");
            expr(out, cond);
            out.push_str(") ");
            block(out, then_branch, level);
            if let Some(e) = else_branch {
                out.push_str(" else ");
                block(out, e, level);
            }
        }
        StmtKind::While { cond, body } => {
            out.push_str("while (");
            expr(out, cond);
            out.push_str(") ");
            block(out, body, level);
        }
        StmtKind::For {
            init,
            cond,
            update,
            body,
        } => {
            out.push_str("for (");
            simple(out, init);
            out.push_str("; ");
            expr(out, cond);
            out.push_str("; ");
            simple(out, update);
            out.push_str(") ");
            block(out, body, level);
        }
        StmtKind::ForIn {
            decl,
            var,
            object,
            body,
            ..
        } => {
            out.push_str("for (");
            if let Some(d) = decl {
                out.push_str(d.keyword());
                out.push(' ');
            }
            let _ = write!(out, "{var} in ");
            expr(out, object);
            out.push_str(") ");
            block(out, body, level);
        }
        StmtKind::Function(f) => function(out, f, level),
        StmtKind::Return(v) => {
            out.push_str("return");
            if let Some(v) = v {
                out.push(' ');
                expr(out, v);
            }
            out.push(';');
        }
        StmtKind::Block(b) => block(out, b, level),
    }
    out.push('\n');
}

fn function(out: &mut String, f: &Function, level: usize) {
    out.push_str("function");
    if let Some(n) = &f.name {
        out.push(' ');
        out.push_str(n);
    }
    let _ = write!(out, "({}) ", f.params.join(", "));
    block(out, &f.body, level);
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

pub(crate) fn quote(s: &str) -> String {
    let mut q = String::with_capacity(s.len() + 2);
    q.push('"');
    for c in s.chars() {
        match c {
            '"' => q.push_str("\\\""),
            '\\' => q.push_str("\\\\"),
            '\n' => q.push_str("\\n"),
            '\t' => q.push_str("\\t"),
            '\r' => q.push_str("\\r"),
            '\0' => q.push_str("\\0"),
            c => q.push(c),
        }
    }
    q.push('"');
    q
}

fn needs_parens_as_base(e: &Expr) -> bool {
    matches!(
        e.kind,
        ExprKind::Binary { .. }
            | ExprKind::Unary { .. }
            | ExprKind::Function(_)
            | ExprKind::Object(_)
            | ExprKind::Num(_)
    )
}

fn expr(out: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Ident(n) => out.push_str(n),
        ExprKind::Num(n) => {
            let _ = write!(out, "{n}");
        }
        ExprKind::Str(s) => out.push_str(&quote(s)),
        ExprKind::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        ExprKind::Null => out.push_str("null"),
        ExprKind::Member { object, property } => {
            base(out, object);
            match property {
                Property::Static(p) => {
                    out.push('.');
                    out.push_str(p);
                }
                Property::Dynamic(p) => {
                    out.push('[');
                    expr(out, p);
                    out.push(']');
                }
            }
        }
        ExprKind::Call { callee, args } => {
            base(out, callee);
            args_list(out, args);
        }
        ExprKind::Function(f) => function(out, f, 0),
        ExprKind::Binary { op, lhs, rhs } => {
            out.push('(');
            expr(out, lhs);
            let _ = write!(out, " {} ", op.symbol());
            expr(out, rhs);
            out.push(')');
        }
        ExprKind::Unary { op, operand } => {
            out.push_str(match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
                UnaryOp::Delete => "delete ",
            });
            if matches!(operand.kind, ExprKind::Unary { .. }) {
                out.push('(');
                expr(out, operand);
                out.push(')');
            } else {
                expr(out, operand);
            }
        }
        ExprKind::Object(fields) => {
            out.push('{');
            for (i, (k, v)) in fields.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                if is_ident(k) {
                    out.push_str(k);
                } else {
                    out.push_str(&quote(k));
                }
                out.push_str(": ");
                expr(out, v);
            }
            out.push('}');
        }
        ExprKind::Import { arg } => {
            out.push_str("require(");
            expr(out, arg);
            out.push(')');
        }
        ExprKind::Eval { arg } => {
            out.push_str("eval(");
            expr(out, arg);
            out.push(')');
        }
    }
}

fn base(out: &mut String, e: &Expr) {
    if needs_parens_as_base(e) {
        out.push('(');
        expr(out, e);
        out.push(')');
    } else {
        expr(out, e);
    }
}

fn args_list(out: &mut String, args: &[Expr]) {
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, a);
    }
    out.push(')');
}
