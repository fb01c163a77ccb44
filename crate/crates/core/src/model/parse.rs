use std::collections::BTreeSet;

use thiserror::Error;

use super::{is_label, Arrow, Con, ConnectionStmt, ContextEntity, Endpoint, Procedure, SystemModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}: {name} is declared twice")]
    DuplicateLabel { line: usize, name: String },
    #[error("line {line}: unknown section {name:?}")]
    UnknownSection { line: usize, name: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Section {
    Abstract,
    Procedures,
    Context,
    Connections,
    Graph,
}

impl Section {
    fn from_word(word: &str) -> Option<Section> {
        Some(match word {
            "abstract" => Section::Abstract,
            "procedures" => Section::Procedures,
            "context" => Section::Context,
            "connections" => Section::Connections,
            "graph" | "graphs" => Section::Graph,
            _ => return None,
        })
    }
}

/// `word.` at the start of a line, followed by whitespace or the line end.
/// Returns the word and the remainder after the dot.
fn header(line: &str) -> Option<(&str, &str)> {
    let end = line.find(|c: char| !c.is_ascii_alphabetic())?;
    let (word, rest) = line.split_at(end);
    let rest = rest.strip_prefix('.')?;
    (!word.is_empty() && (rest.is_empty() || rest.starts_with(char::is_whitespace))).then_some((word, rest))
}

/// Splits off a trailing `//` comment; an empty comment counts as none.
fn split_comment(line: &str) -> (&str, Option<String>) {
    match line.find("//") {
        Some(at) => {
            let comment = line[at + 2..].trim();
            (&line[..at], (!comment.is_empty()).then(|| comment.to_string()))
        }
        None => (line, None),
    }
}

fn append_comment(slot: &mut Option<String>, text: String) {
    match slot {
        Some(existing) => {
            existing.push(' ');
            existing.push_str(&text);
        }
        None => *slot = Some(text),
    }
}

struct Scanner {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    /// Characters of leading indentation stripped before scanning.
    indent: usize,
}

impl Scanner {
    fn new(src: &str, line: usize, indent: usize) -> Self {
        Scanner { chars: src.chars().collect(), pos: 0, line, indent }
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError::Syntax { line: self.line, col: self.indent + self.pos + 1, message: message.into() }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.chars.len()
    }

    fn eat(&mut self, token: &str) -> bool {
        let token: Vec<char> = token.chars().collect();
        if self.chars[self.pos..].starts_with(&token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), ParseError> {
        self.skip_ws();
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{token}`")))
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> String {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|&c| f(c)) {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn label(&mut self) -> Result<String, ParseError> {
        self.skip_ws();
        let label = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if is_label(&label) {
            Ok(label)
        } else {
            Err(self.error("expected a label of letters, digits and `_`"))
        }
    }

    fn endpoint(&mut self) -> Result<Endpoint, ParseError> {
        self.skip_ws();
        if self.eat("[") {
            let label = self.label()?;
            self.expect("]")?;
            Ok(Endpoint::Procedure(label))
        } else if self.eat("(") {
            let label = self.label()?;
            self.expect(")")?;
            Ok(Endpoint::Context(label))
        } else {
            Err(self.error("expected `[procedure]` or `(context)`"))
        }
    }

    fn arrow(&mut self) -> Result<Arrow, ParseError> {
        self.skip_ws();
        for (token, arrow) in
            [("<->", Arrow::Both), ("<-", Arrow::Left), ("->", Arrow::Right), ("↔", Arrow::Both), ("←", Arrow::Left), ("→", Arrow::Right)]
        {
            if self.eat(token) {
                return Ok(arrow);
            }
        }
        Err(self.error("expected an arrow (→, ←, ↔, ->, <-, <->)"))
    }

    fn con_clause(&mut self) -> Result<Option<Vec<Con>>, ParseError> {
        self.skip_ws();
        let rest: String = self.chars[self.pos..].iter().collect();
        let is_con = rest.strip_prefix("con").is_some_and(|r| r.trim_start().starts_with('('));
        if !is_con {
            return Ok(None);
        }
        let mut terms = Vec::new();
        loop {
            self.expect("con")?;
            self.expect("(")?;
            let from = self.label()?;
            self.expect(",")?;
            let to = self.label()?;
            self.expect(")")?;
            terms.push(Con { from, to });
            self.skip_ws();
            if !(self.eat("∧") || self.eat("/\\") || self.eat("&")) {
                break;
            }
        }
        self.expect(":")?;
        Ok(Some(terms))
    }
}

enum Last {
    None,
    Procedure,
    Context,
    Connection,
}

struct Parser {
    model: SystemModel,
    section: Option<Section>,
    last: Last,
    pending: Vec<String>,
    abstract_lines: Vec<String>,
    graph_lines: Vec<String>,
    fence: Option<(usize, Vec<String>)>,
    procedure_ids: BTreeSet<u32>,
    context_ids: BTreeSet<String>,
}

/// Parses a model document.
pub fn parse(document: &str) -> Result<SystemModel, ParseError> {
    let mut parser = Parser {
        model: SystemModel::default(),
        section: None,
        last: Last::None,
        pending: Vec::new(),
        abstract_lines: Vec::new(),
        graph_lines: Vec::new(),
        fence: None,
        procedure_ids: BTreeSet::new(),
        context_ids: BTreeSet::new(),
    };
    for (index, raw) in document.lines().enumerate() {
        parser.line(index + 1, raw)?;
    }
    if let Some((line, _)) = parser.fence {
        return Err(ParseError::Syntax { line, col: 1, message: "unterminated ``` block".into() });
    }
    parser.model.abstract_text = trim_block(parser.abstract_lines);
    if parser.model.graph_text.is_some() {
        parser.model.graph_text = Some(trim_block(parser.graph_lines));
    }
    Ok(parser.model)
}

fn trim_block(lines: Vec<String>) -> String {
    let start = lines.iter().position(|l| !l.is_empty()).unwrap_or(lines.len());
    let end = lines.iter().rposition(|l| !l.is_empty()).map_or(start, |e| e + 1);
    lines[start..end].join("\n")
}

impl Parser {
    fn line(&mut self, number: usize, raw: &str) -> Result<(), ParseError> {
        let trimmed = raw.trim_start();
        let indent = raw[..raw.len() - trimmed.len()].chars().count();
        let trimmed = trimmed.trim_end();

        if let Some((_, doc)) = &mut self.fence {
            if trimmed != "```" {
                doc.push(raw.trim_end().to_string());
                return Ok(());
            }
            let text = doc.join("\n");
            self.fence = None;
            let procedure = self.model.procedures.last_mut().expect("fence opens after a procedure");
            procedure.documentation = Some(text);
            return Ok(());
        }

        if let Some((word, rest)) = header(trimmed) {
            match Section::from_word(word) {
                Some(section) => return self.open(number, section, rest.trim(), indent + word.chars().count() + 2),
                None if word.chars().all(|c| c.is_ascii_lowercase())
                    && !matches!(self.section, Some(Section::Abstract | Section::Graph)) =>
                {
                    return Err(ParseError::UnknownSection { line: number, name: word.to_string() });
                }
                None => {}
            }
        }

        match self.section {
            Some(Section::Abstract) => self.abstract_lines.push(trimmed.to_string()),
            Some(Section::Graph) => self.graph_lines.push(raw.trim_end().to_string()),
            _ if trimmed.is_empty() => {}
            _ if trimmed.starts_with("//") => self.comment(split_comment(trimmed).1),
            None => {
                return Err(ParseError::Syntax {
                    line: number,
                    col: indent + 1,
                    message: "content before the first section header".into(),
                })
            }
            Some(Section::Procedures) if trimmed == "```" => {
                if !matches!(self.last, Last::Procedure) {
                    return Err(ParseError::Syntax {
                        line: number,
                        col: indent + 1,
                        message: "documentation block must follow a procedure".into(),
                    });
                }
                self.fence = Some((number, Vec::new()));
            }
            Some(Section::Procedures) => self.procedure(number, trimmed, indent)?,
            Some(Section::Context) => self.context(number, trimmed, indent)?,
            Some(Section::Connections) => self.connection(number, trimmed, indent)?,
        }
        Ok(())
    }

    fn open(&mut self, number: usize, section: Section, rest: &str, col: usize) -> Result<(), ParseError> {
        self.section = Some(section);
        self.last = Last::None;
        self.pending.clear();
        match section {
            Section::Abstract => {
                if !self.abstract_lines.is_empty() {
                    self.abstract_lines.push(String::new());
                }
                self.abstract_lines.push(rest.to_string());
            }
            Section::Graph => {
                self.model.graph_text.get_or_insert_with(String::new);
                if !rest.is_empty() {
                    self.graph_lines.push(rest.to_string());
                }
            }
            _ => {
                let (code, comment) = split_comment(rest);
                if !code.trim().is_empty() {
                    return Err(ParseError::Syntax { line: number, col, message: "unexpected text after section header".into() });
                }
                self.comment(comment);
            }
        }
        Ok(())
    }

    fn comment(&mut self, comment: Option<String>) {
        let Some(text) = comment else { return };
        let slot = match self.last {
            Last::None => return self.pending.push(text),
            Last::Procedure => self.model.procedures.last_mut().map(|p| &mut p.comment),
            Last::Context => self.model.contexts.last_mut().map(|c| &mut c.comment),
            Last::Connection => self.model.connections.last_mut().map(|c| &mut c.comment),
        };
        if let Some(slot) = slot {
            append_comment(slot, text);
        }
    }

    /// Comment for a new item: comment lines waiting above it, then its own.
    fn take_comment(&mut self, inline: Option<String>) -> Option<String> {
        let mut comment = None;
        for text in self.pending.drain(..).chain(inline) {
            append_comment(&mut comment, text);
        }
        comment
    }

    fn procedure(&mut self, number: usize, line: &str, indent: usize) -> Result<(), ParseError> {
        let (code, comment) = split_comment(line);
        let mut s = Scanner::new(code, number, indent);
        s.skip_ws();
        let digits = s.take_while(|c| c.is_ascii_digit());
        let id: u32 = digits.parse().map_err(|_| s.error("expected a numeric procedure id"))?;
        s.expect(":")?;
        s.skip_ws();
        if s.chars.get(s.pos) == Some(&'(') {
            return Err(s.error("procedure labels go in square brackets"));
        }
        let label = match s.endpoint()? {
            Endpoint::Procedure(label) => label,
            Endpoint::Context(_) => unreachable!(),
        };
        if !s.at_end() {
            return Err(s.error("unexpected text after declaration"));
        }
        if !self.procedure_ids.insert(id) {
            return Err(ParseError::DuplicateLabel { line: number, name: format!("procedure id {id}") });
        }
        if self.model.procedure(&label).is_some() {
            return Err(ParseError::DuplicateLabel { line: number, name: format!("[{label}]") });
        }
        let comment = self.take_comment(comment);
        self.model.procedures.push(Procedure { id, label, comment, documentation: None });
        self.last = Last::Procedure;
        Ok(())
    }

    fn context(&mut self, number: usize, line: &str, indent: usize) -> Result<(), ParseError> {
        let (code, comment) = split_comment(line);
        let mut s = Scanner::new(code, number, indent);
        s.skip_ws();
        let id = s.take_while(|c| c.is_ascii_alphabetic());
        if id.is_empty() {
            return Err(s.error("expected a letter context id"));
        }
        s.expect(":")?;
        s.skip_ws();
        if s.chars.get(s.pos) == Some(&'[') {
            return Err(s.error("context labels go in parentheses"));
        }
        let label = match s.endpoint()? {
            Endpoint::Context(label) => label,
            Endpoint::Procedure(_) => unreachable!(),
        };
        if !s.at_end() {
            return Err(s.error("unexpected text after declaration"));
        }
        if !self.context_ids.insert(id.clone()) {
            return Err(ParseError::DuplicateLabel { line: number, name: format!("context id {id}") });
        }
        if self.model.context(&label).is_some() {
            return Err(ParseError::DuplicateLabel { line: number, name: format!("({label})") });
        }
        let comment = self.take_comment(comment);
        self.model.contexts.push(ContextEntity { id, label, comment });
        self.last = Last::Context;
        Ok(())
    }

    fn connection(&mut self, number: usize, line: &str, indent: usize) -> Result<(), ParseError> {
        let (code, comment) = split_comment(line);
        let mut s = Scanner::new(code, number, indent);
        let con = s.con_clause()?;
        let left = s.endpoint()?;
        let arrow = s.arrow()?;
        let right = s.endpoint()?;
        if !s.at_end() {
            return Err(s.error("unexpected text after connection"));
        }
        let comment = self.take_comment(comment);
        self.model.connections.push(ConnectionStmt { con, left, arrow, right, comment });
        self.last = Last::Connection;
        Ok(())
    }
}
