//! Parser for the line-oriented model format.
//!
//! One declaration per line, `#` comments, quoted strings for display names.
//! Parsing is total: any input yields either a model or a non-empty list of
//! diagnostics with exact source positions. Reference problems are collected
//! across the whole file instead of failing fast, and forward references
//! within a file are fine (declarations are gathered in a first pass).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::decimal::Decimal;
use crate::ontology::{
    ActorId, ActorRole, Bank, BankId, BankKind, EnterpriseModel, FactId, FactKind, InfoLink,
    IutEntry, Locus, PsdLink, PsdLinkKind, StepMetrics, StepRef, TransactionId, TransactionKind,
};

/// A 1-based position in a source file.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiagnosticKind {
    Syntax,
    Reference,
    Duplicate,
}

/// One parse problem, anchored to the offending token.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            DiagnosticKind::Syntax => "syntax",
            DiagnosticKind::Reference => "reference",
            DiagnosticKind::Duplicate => "duplicate",
        };
        write!(f, "{}: {} error: {}", self.span, kind, self.message)
    }
}

// ---------------------------------------------------------------------------
// Lexer
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
enum Token {
    /// Bare word: keyword, identifier, step reference or decimal.
    Word(String),
    /// Quoted string, unescaped.
    Text(String),
    Arrow,
    Comma,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Word(w) => format!("{w:?}"),
            Token::Text(_) => "quoted string".to_string(),
            Token::Arrow => "\"->\"".to_string(),
            Token::Comma => "\",\"".to_string(),
        }
    }
}

/// Tokenizes one line; columns are 1-based character offsets.
fn tokenize(line: &str) -> Result<Vec<(Token, usize)>, (usize, String)> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = line.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' {
            break;
        } else if c == ',' {
            tokens.push((Token::Comma, i + 1));
            i += 1;
        } else if c == '-' && chars.get(i + 1) == Some(&'>') {
            tokens.push((Token::Arrow, i + 1));
            i += 2;
        } else if c == '"' {
            let start = i + 1;
            let mut text = String::new();
            i += 1;
            loop {
                match chars.get(i) {
                    None => return Err((start, "unterminated quoted string".into())),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') => {
                        match chars.get(i + 1) {
                            Some('"') => text.push('"'),
                            Some('\\') => text.push('\\'),
                            Some('n') => text.push('\n'),
                            other => {
                                return Err((
                                    i + 1,
                                    format!(
                                        "unsupported escape \\{}",
                                        other.copied().map(String::from).unwrap_or_default()
                                    ),
                                ))
                            }
                        }
                        i += 2;
                    }
                    Some(&ch) => {
                        text.push(ch);
                        i += 1;
                    }
                }
            }
            tokens.push((Token::Text(text), start));
        } else {
            let start = i;
            let mut word = String::new();
            while i < chars.len() {
                let ch = chars[i];
                if ch.is_whitespace() || ch == ',' || ch == '"' || ch == '#' {
                    break;
                }
                if ch == '-' && chars.get(i + 1) == Some(&'>') {
                    break;
                }
                word.push(ch);
                i += 1;
            }
            tokens.push((Token::Word(word), start + 1));
        }
    }
    Ok(tokens)
}

// ---------------------------------------------------------------------------
// Statement parsing (pass 1)
// ---------------------------------------------------------------------------

/// A raw identifier token with the column it came from.
#[derive(Clone, Debug)]
struct Spanned<T> {
    value: T,
    column: usize,
}

#[derive(Clone, Debug)]
enum Stmt {
    Model(String),
    Actor {
        id: Spanned<String>,
        name: String,
        locus: Locus,
    },
    Fact {
        id: Spanned<String>,
        statement: String,
    },
    Transaction {
        id: Spanned<String>,
        name: String,
        result: Spanned<String>,
        executor: Spanned<String>,
        initiators: Vec<Spanned<String>>,
    },
    Bank {
        id: Spanned<String>,
        kind: BankKind,
        name: String,
        contents: Vec<Spanned<String>>,
    },
    Access {
        actor: Spanned<String>,
        bank: Spanned<String>,
    },
    Psd {
        kind: PsdLinkKind,
        from: Spanned<StepRef>,
        to: Spanned<StepRef>,
    },
    Use {
        fact: Spanned<String>,
        step: Spanned<StepRef>,
    },
    Metrics {
        step: Spanned<StepRef>,
        duration: Decimal,
        cost: Decimal,
        frequency: Decimal,
        label: Option<String>,
    },
}

struct LineParser<'a> {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    line_len: usize,
    _line: &'a str,
}

type LineResult<T> = Result<T, (usize, String)>;

impl<'a> LineParser<'a> {
    fn next(&mut self) -> Option<(Token, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn end_column(&self) -> usize {
        self.line_len + 1
    }

    fn expect_word(&mut self, what: &str) -> LineResult<Spanned<String>> {
        match self.next() {
            Some((Token::Word(w), col)) => Ok(Spanned {
                value: w,
                column: col,
            }),
            Some((other, col)) => {
                Err((col, format!("expected {what}, found {}", other.describe())))
            }
            None => Err((self.end_column(), format!("expected {what}"))),
        }
    }

    fn expect_text(&mut self, what: &str) -> LineResult<String> {
        match self.next() {
            Some((Token::Text(t), _)) => Ok(t),
            Some((other, col)) => Err((
                col,
                format!("expected quoted {what}, found {}", other.describe()),
            )),
            None => Err((self.end_column(), format!("expected quoted {what}"))),
        }
    }

    fn expect_keyword(&mut self, keyword: &str) -> LineResult<()> {
        match self.next() {
            Some((Token::Word(w), _)) if w.eq_ignore_ascii_case(keyword) => Ok(()),
            Some((other, col)) => Err((
                col,
                format!("expected keyword \"{keyword}\", found {}", other.describe()),
            )),
            None => Err((self.end_column(), format!("expected keyword \"{keyword}\""))),
        }
    }

    fn expect_arrow(&mut self) -> LineResult<()> {
        match self.next() {
            Some((Token::Arrow, _)) => Ok(()),
            Some((other, col)) => {
                Err((col, format!("expected \"->\", found {}", other.describe())))
            }
            None => Err((self.end_column(), "expected \"->\"".into())),
        }
    }

    fn expect_step_ref(&mut self) -> LineResult<Spanned<StepRef>> {
        let word = self.expect_word("a step reference like B-T01/rq")?;
        let step = StepRef::from_str(&word.value).map_err(|()| {
            (
                word.column,
                format!(
                    "malformed step reference {:?} (expected <transaction>/<rq|pm|dc|qt|ex|st|ac|rj|sp>)",
                    word.value
                ),
            )
        })?;
        Ok(Spanned {
            value: step,
            column: word.column,
        })
    }

    /// Decimal with at most 3 fractional digits.
    fn expect_decimal(&mut self, what: &str) -> LineResult<Decimal> {
        let word = self.expect_word(&format!("a decimal {what}"))?;
        let value: Decimal = word
            .value
            .parse()
            .map_err(|_| (word.column, format!("invalid decimal {:?}", word.value)))?;
        if !value.fits_places(3) {
            return Err((
                word.column,
                format!("{what} {:?} has more than 3 fractional digits", word.value),
            ));
        }
        Ok(value)
    }

    /// `<ID>[,<ID>]*`, at least one entry.
    fn id_list(&mut self, what: &str) -> LineResult<Vec<Spanned<String>>> {
        let mut ids = vec![self.expect_word(what)?];
        while matches!(self.tokens.get(self.pos), Some((Token::Comma, _))) {
            self.pos += 1;
            ids.push(self.expect_word(what)?);
        }
        Ok(ids)
    }

    fn expect_end(&mut self) -> LineResult<()> {
        match self.next() {
            None => Ok(()),
            Some((tok, col)) => Err((col, format!("unexpected trailing {}", tok.describe()))),
        }
    }
}

fn parse_line(line: &str) -> LineResult<Option<Stmt>> {
    let tokens = tokenize(line)?;
    if tokens.is_empty() {
        return Ok(None);
    }
    let mut p = LineParser {
        tokens,
        pos: 0,
        line_len: line.chars().count(),
        _line: line,
    };
    let head = p.expect_word("a declaration keyword")?;
    let stmt = match head.value.to_ascii_lowercase().as_str() {
        "model" => Stmt::Model(p.expect_text("model name")?),
        "actor" => {
            let id = p.expect_word("an actor id")?;
            let name = p.expect_text("actor name")?;
            let locus_word = p.expect_word("a locus (internal|environmental|composite)")?;
            let locus = Locus::from_str(&locus_word.value).map_err(|()| {
                (
                    locus_word.column,
                    format!(
                        "unknown locus {:?} (expected internal, environmental or composite)",
                        locus_word.value
                    ),
                )
            })?;
            Stmt::Actor { id, name, locus }
        }
        "fact" => {
            let id = p.expect_word("a fact id")?;
            let statement = p.expect_text("fact statement")?;
            Stmt::Fact { id, statement }
        }
        "transaction" => {
            let id = p.expect_word("a transaction id")?;
            let name = p.expect_text("transaction name")?;
            p.expect_keyword("result")?;
            let result = p.expect_word("a fact id")?;
            p.expect_keyword("executor")?;
            let executor = p.expect_word("an actor id")?;
            p.expect_keyword("initiators")?;
            let initiators = p.id_list("an actor id")?;
            Stmt::Transaction {
                id,
                name,
                result,
                executor,
                initiators,
            }
        }
        "bank" => {
            let id = p.expect_word("a bank id")?;
            let kind_word = p.expect_word("a bank kind (production|coordination)")?;
            let kind = BankKind::from_str(&kind_word.value).map_err(|()| {
                (
                    kind_word.column,
                    format!(
                        "unknown bank kind {:?} (expected production or coordination)",
                        kind_word.value
                    ),
                )
            })?;
            let name = p.expect_text("bank name")?;
            let contents = if p.tokens.get(p.pos).is_some() {
                p.expect_keyword("contains")?;
                p.id_list("a fact id")?
            } else {
                Vec::new()
            };
            Stmt::Bank {
                id,
                kind,
                name,
                contents,
            }
        }
        "access" => {
            let actor = p.expect_word("an actor id")?;
            let bank = p.expect_word("a bank id")?;
            Stmt::Access { actor, bank }
        }
        "trigger" | "wait" => {
            let kind = if head.value.eq_ignore_ascii_case("trigger") {
                PsdLinkKind::Causal
            } else {
                PsdLinkKind::Wait
            };
            let from = p.expect_step_ref()?;
            p.expect_arrow()?;
            let to = p.expect_step_ref()?;
            Stmt::Psd { kind, from, to }
        }
        "use" => {
            let fact = p.expect_word("a fact id")?;
            p.expect_keyword("at")?;
            let step = p.expect_step_ref()?;
            Stmt::Use { fact, step }
        }
        "metrics" => {
            let step = p.expect_step_ref()?;
            p.expect_keyword("time")?;
            let duration = p.expect_decimal("time")?;
            p.expect_keyword("cost")?;
            let cost = p.expect_decimal("cost")?;
            p.expect_keyword("freq")?;
            let frequency = p.expect_decimal("freq")?;
            let label = if p.tokens.get(p.pos).is_some() {
                p.expect_keyword("label")?;
                Some(p.expect_text("label")?)
            } else {
                None
            };
            Stmt::Metrics {
                step,
                duration,
                cost,
                frequency,
                label,
            }
        }
        other => {
            return Err((
                head.column,
                format!(
                    "unknown declaration {other:?} (expected model, actor, fact, transaction, \
                     bank, access, trigger, wait, use or metrics)"
                ),
            ))
        }
    };
    p.expect_end()?;
    Ok(Some(stmt))
}

// ---------------------------------------------------------------------------
// Model assembly (pass 2)
// ---------------------------------------------------------------------------

struct Assembler<'a> {
    file: &'a str,
    diagnostics: Vec<ParseDiagnostic>,
}

impl<'a> Assembler<'a> {
    fn push(&mut self, kind: DiagnosticKind, line: usize, column: usize, message: String) {
        self.diagnostics.push(ParseDiagnostic {
            span: SourceSpan {
                file: self.file.to_string(),
                line,
                column,
            },
            kind,
            message,
        });
    }
}

/// Parses model text. `file` only labels diagnostic spans.
pub fn parse(text: &str, file: &str) -> Result<EnterpriseModel, Vec<ParseDiagnostic>> {
    let mut asm = Assembler {
        file,
        diagnostics: Vec::new(),
    };
    // CRLF input is accepted; only trailing \r needs stripping per line.
    let mut stmts: Vec<(usize, Stmt)> = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        match parse_line(raw_line.strip_suffix('\r').unwrap_or(raw_line)) {
            Ok(Some(stmt)) => stmts.push((line_no, stmt)),
            Ok(None) => {}
            Err((column, message)) => {
                asm.push(DiagnosticKind::Syntax, line_no, column, message);
            }
        }
    }

    // Declarations first, so later lines may reference earlier or later ones.
    let mut model = EnterpriseModel::empty("unnamed");
    let mut model_line_seen: Option<usize> = None;
    for (line, stmt) in &stmts {
        match stmt {
            Stmt::Model(name) => {
                if let Some(previous) = model_line_seen {
                    asm.push(
                        DiagnosticKind::Duplicate,
                        *line,
                        1,
                        format!("model name was already set on line {previous}"),
                    );
                } else {
                    model.name = name.clone();
                    model_line_seen = Some(*line);
                }
            }
            Stmt::Actor { id, name, locus } => {
                let actor_id = ActorId::new(&id.value);
                if model.actors.contains_key(&actor_id) {
                    asm.push(
                        DiagnosticKind::Duplicate,
                        *line,
                        id.column,
                        format!("actor {actor_id} is already declared"),
                    );
                } else {
                    model.actors.insert(
                        actor_id.clone(),
                        ActorRole {
                            id: actor_id,
                            name: name.clone(),
                            locus: *locus,
                        },
                    );
                }
            }
            Stmt::Fact { id, statement } => {
                let fact_id = FactId::new(&id.value);
                if model.facts.contains_key(&fact_id) {
                    asm.push(
                        DiagnosticKind::Duplicate,
                        *line,
                        id.column,
                        format!("fact {fact_id} is already declared"),
                    );
                } else {
                    model.facts.insert(
                        fact_id.clone(),
                        FactKind {
                            id: fact_id,
                            statement: statement.clone(),
                        },
                    );
                }
            }
            Stmt::Transaction { id, name, .. } => {
                let tx_id = TransactionId::new(&id.value);
                if model.transactions.contains_key(&tx_id) {
                    asm.push(
                        DiagnosticKind::Duplicate,
                        *line,
                        id.column,
                        format!("transaction {tx_id} is already declared"),
                    );
                } else {
                    // References are resolved in the second sweep.
                    model.transactions.insert(
                        tx_id.clone(),
                        TransactionKind {
                            id: tx_id,
                            name: name.clone(),
                            result: FactId::new(""),
                            executor: ActorId::new(""),
                            initiators: Default::default(),
                        },
                    );
                }
            }
            Stmt::Bank { id, kind, name, .. } => {
                let bank_id = BankId::new(&id.value);
                if model.banks.contains_key(&bank_id) {
                    asm.push(
                        DiagnosticKind::Duplicate,
                        *line,
                        id.column,
                        format!("bank {bank_id} is already declared"),
                    );
                } else {
                    model.banks.insert(
                        bank_id.clone(),
                        Bank {
                            id: bank_id,
                            kind: *kind,
                            name: name.clone(),
                            contents: Default::default(),
                        },
                    );
                }
            }
            _ => {}
        }
    }

    // Resolve references and fill in link/metric sections.
    let mut seen_tx: BTreeMap<TransactionId, ()> = BTreeMap::new();
    for (line, stmt) in &stmts {
        match stmt {
            Stmt::Model(_) | Stmt::Actor { .. } | Stmt::Fact { .. } => {}
            Stmt::Transaction {
                id,
                result,
                executor,
                initiators,
                ..
            } => {
                let tx_id = TransactionId::new(&id.value);
                if seen_tx.insert(tx_id.clone(), ()).is_some() {
                    continue; // duplicate declaration already reported
                }
                let result_id = asm.resolve_fact(&model, result, *line);
                let executor_id = asm.resolve_actor(&model, executor, *line);
                let mut initiator_ids = Vec::new();
                for initiator in initiators {
                    if let Some(a) = asm.resolve_actor(&model, initiator, *line) {
                        initiator_ids.push(a);
                    }
                }
                let tx = model.transactions.get_mut(&tx_id).expect("declared above");
                if let Some(r) = result_id {
                    tx.result = r;
                }
                if let Some(e) = executor_id {
                    tx.executor = e;
                }
                tx.initiators = initiator_ids.into_iter().collect();
            }
            Stmt::Bank { id, contents, .. } => {
                let bank_id = BankId::new(&id.value);
                let mut resolved = Vec::new();
                for fact in contents {
                    if let Some(f) = asm.resolve_fact(&model, fact, *line) {
                        resolved.push(f);
                    }
                }
                if let Some(bank) = model.banks.get_mut(&bank_id) {
                    if bank.contents.is_empty() {
                        bank.contents = resolved.into_iter().collect();
                    }
                }
            }
            Stmt::Access { actor, bank } => {
                let actor_id = asm.resolve_actor(&model, actor, *line);
                let bank_id = asm.resolve_bank(&model, bank, *line);
                if let (Some(actor), Some(bank)) = (actor_id, bank_id) {
                    let link = InfoLink { actor, bank };
                    if !model.info_links.insert(link) {
                        asm.push(
                            DiagnosticKind::Duplicate,
                            *line,
                            1,
                            "this access link is already declared".into(),
                        );
                    }
                }
            }
            Stmt::Psd { kind, from, to } => {
                let from_ok = asm.resolve_step(&model, from, *line);
                let to_ok = asm.resolve_step(&model, to, *line);
                if from_ok && to_ok {
                    let link = PsdLink {
                        kind: *kind,
                        from: from.value.clone(),
                        to: to.value.clone(),
                    };
                    if !model.psd_links.insert(link) {
                        asm.push(
                            DiagnosticKind::Duplicate,
                            *line,
                            1,
                            "this process link is already declared".into(),
                        );
                    }
                }
            }
            Stmt::Use { fact, step } => {
                let fact_id = asm.resolve_fact(&model, fact, *line);
                let step_ok = asm.resolve_step(&model, step, *line);
                if let (Some(fact), true) = (fact_id, step_ok) {
                    let entry = IutEntry {
                        fact,
                        step: step.value.clone(),
                    };
                    if !model.iut_entries.insert(entry) {
                        asm.push(
                            DiagnosticKind::Duplicate,
                            *line,
                            1,
                            "this information-use entry is already declared".into(),
                        );
                    }
                }
            }
            Stmt::Metrics {
                step,
                duration,
                cost,
                frequency,
                label,
            } => {
                if !asm.resolve_step(&model, step, *line) {
                    continue;
                }
                if model.metrics.contains_key(&step.value) {
                    asm.push(
                        DiagnosticKind::Duplicate,
                        *line,
                        step.column,
                        format!("metrics for step {} are already declared", step.value),
                    );
                    continue;
                }
                model.metrics.insert(
                    step.value.clone(),
                    StepMetrics {
                        step: step.value.clone(),
                        duration: *duration,
                        cost: *cost,
                        daily_frequency: *frequency,
                        label: label.clone().unwrap_or_else(|| step.value.to_string()),
                    },
                );
            }
        }
    }

    if asm.diagnostics.is_empty() {
        Ok(model)
    } else {
        let mut diagnostics = asm.diagnostics;
        diagnostics.sort_by(|a, b| (&a.span, &a.message).cmp(&(&b.span, &b.message)));
        Err(diagnostics)
    }
}

impl<'a> Assembler<'a> {
    fn resolve_actor(
        &mut self,
        model: &EnterpriseModel,
        raw: &Spanned<String>,
        line: usize,
    ) -> Option<ActorId> {
        let id = ActorId::new(&raw.value);
        if model.actors.contains_key(&id) {
            Some(id)
        } else {
            self.push(
                DiagnosticKind::Reference,
                line,
                raw.column,
                format!("actor {id} is not declared"),
            );
            None
        }
    }

    fn resolve_fact(
        &mut self,
        model: &EnterpriseModel,
        raw: &Spanned<String>,
        line: usize,
    ) -> Option<FactId> {
        let id = FactId::new(&raw.value);
        if model.facts.contains_key(&id) {
            Some(id)
        } else {
            self.push(
                DiagnosticKind::Reference,
                line,
                raw.column,
                format!("fact {id} is not declared"),
            );
            None
        }
    }

    fn resolve_bank(
        &mut self,
        model: &EnterpriseModel,
        raw: &Spanned<String>,
        line: usize,
    ) -> Option<BankId> {
        let id = BankId::new(&raw.value);
        if model.banks.contains_key(&id) {
            Some(id)
        } else {
            self.push(
                DiagnosticKind::Reference,
                line,
                raw.column,
                format!("bank {id} is not declared"),
            );
            None
        }
    }

    fn resolve_step(
        &mut self,
        model: &EnterpriseModel,
        step: &Spanned<StepRef>,
        line: usize,
    ) -> bool {
        if model.transactions.contains_key(&step.value.transaction) {
            true
        } else {
            self.push(
                DiagnosticKind::Reference,
                line,
                step.column,
                format!("transaction {} is not declared", step.value.transaction),
            );
            false
        }
    }
}
