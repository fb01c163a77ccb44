use std::fmt;

use super::{ConnectionStmt, SystemModel};

fn comment(f: &mut fmt::Formatter<'_>, comment: &Option<String>) -> fmt::Result {
    match comment {
        Some(c) => writeln!(f, " // {c}"),
        None => writeln!(f),
    }
}

impl fmt::Display for ConnectionStmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(terms) = &self.con {
            let terms: Vec<String> = terms.iter().map(|c| format!("con({}, {})", c.from, c.to)).collect();
            write!(f, "{} : ", terms.join(" ∧ "))?;
        }
        write!(f, "{} {} {}", self.left, self.arrow.symbol(), self.right)
    }
}

/// Canonical text form; parsing it gives back an equal model.
impl fmt::Display for SystemModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.abstract_text.is_empty() {
            writeln!(f, "abstract.")?;
        } else {
            writeln!(f, "abstract. {}", self.abstract_text)?;
        }

        writeln!(f, "\nprocedures.")?;
        for p in &self.procedures {
            write!(f, "{} : [{}]", p.id, p.label)?;
            comment(f, &p.comment)?;
            if let Some(doc) = &p.documentation {
                writeln!(f, "```")?;
                if !doc.is_empty() {
                    writeln!(f, "{doc}")?;
                }
                writeln!(f, "```")?;
            }
        }

        writeln!(f, "\ncontext.")?;
        for c in &self.contexts {
            write!(f, "{} : ({})", c.id, c.label)?;
            comment(f, &c.comment)?;
        }

        writeln!(f, "\nconnections.")?;
        for c in &self.connections {
            write!(f, "{c}")?;
            comment(f, &c.comment)?;
        }

        if let Some(graph) = &self.graph_text {
            writeln!(f, "\ngraph.")?;
            if !graph.is_empty() {
                writeln!(f, "{graph}")?;
            }
        }
        Ok(())
    }
}
