//! Character cursor and lexical rules shared by the Turtle and N-Triples readers.

use super::chars::{is_pn_chars, is_pn_chars_u};
use super::RdfError;

pub(crate) struct Cursor {
    chars: Vec<char>,
    pos: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Self {
        Cursor {
            chars: text.chars().collect(),
            pos: 0,
        }
    }

    pub(crate) fn pos(&self) -> usize {
        self.pos
    }

    pub(crate) fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    pub(crate) fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    pub(crate) fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        Some(c)
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    pub(crate) fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    pub(crate) fn starts_with(&self, s: &str) -> bool {
        s.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i) == Some(c))
    }

    /// Case-insensitive keyword match that also requires a word boundary.
    pub(crate) fn starts_with_keyword(&self, kw: &str) -> bool {
        let n = kw.chars().count();
        kw.chars()
            .enumerate()
            .all(|(i, c)| self.peek_at(i).is_some_and(|d| d.eq_ignore_ascii_case(&c)))
            && !self
                .peek_at(n)
                .is_some_and(|c| is_pn_chars(c) || c == ':' || c == '.')
    }

    pub(crate) fn advance(&mut self, n: usize) {
        self.pos = (self.pos + n).min(self.chars.len());
    }

    /// 1-based line and column of a character offset.
    pub(crate) fn location(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    pub(crate) fn error_at(&self, pos: usize, message: impl Into<String>) -> RdfError {
        let (line, column) = self.location(pos);
        RdfError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> RdfError {
        self.error_at(self.pos, message)
    }

    pub(crate) fn expected(&self, what: &str) -> RdfError {
        match self.peek() {
            Some(c) => self.error(format!("expected {what}, found {c:?}")),
            None => self.error(format!("expected {what}, found end of input")),
        }
    }

    /// Skips whitespace and `#` comments, newlines included.
    pub(crate) fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            match c {
                ' ' | '\t' | '\r' | '\n' => self.pos += 1,
                '#' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.pos += 1;
                    }
                }
                _ => break,
            }
        }
    }

    /// Skips spaces and tabs only.
    pub(crate) fn skip_inline_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t')) {
            self.pos += 1;
        }
    }

    /// Reads an `IRIREF` token, returning the unescaped IRI text.
    pub(crate) fn read_iriref(&mut self) -> Result<String, RdfError> {
        if !self.eat('<') {
            return Err(self.expected("'<'"));
        }
        let mut out = String::new();
        loop {
            let start = self.pos;
            match self.bump() {
                None => return Err(self.error("unterminated IRI")),
                Some('>') => return Ok(out),
                Some('\\') => {
                    let c = match self.bump() {
                        Some('u') => self.read_hex_char(4, start)?,
                        Some('U') => self.read_hex_char(8, start)?,
                        _ => return Err(self.error_at(start, "invalid escape in IRI")),
                    };
                    if is_forbidden_in_iri(c) {
                        return Err(self.error_at(start, format!("character {c:?} not allowed in IRI")));
                    }
                    out.push(c);
                }
                Some(c) if is_forbidden_in_iri(c) => {
                    return Err(self.error_at(start, format!("character {c:?} not allowed in IRI")));
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn read_hex_char(&mut self, digits: usize, start: usize) -> Result<char, RdfError> {
        let mut value: u32 = 0;
        for _ in 0..digits {
            let d = self
                .bump()
                .and_then(|c| c.to_digit(16))
                .ok_or_else(|| self.error_at(start, "invalid unicode escape"))?;
            value = value * 16 + d;
        }
        char::from_u32(value).ok_or_else(|| self.error_at(start, "escape is not a unicode scalar value"))
    }

    /// Reads any of the four string literal forms, returning the unescaped value.
    pub(crate) fn read_string(&mut self, allow_long: bool, allow_single: bool) -> Result<String, RdfError> {
        let quote = match self.peek() {
            Some('"') => '"',
            Some('\'') if allow_single => '\'',
            _ => return Err(self.expected("string literal")),
        };
        let long = allow_long && self.peek_at(1) == Some(quote) && self.peek_at(2) == Some(quote);
        let open = self.pos;
        self.advance(if long { 3 } else { 1 });
        let mut out = String::new();
        loop {
            let start = self.pos;
            match self.bump() {
                None => return Err(self.error_at(open, "unterminated string literal")),
                Some(c) if c == quote => {
                    if !long {
                        return Ok(out);
                    }
                    if self.peek() == Some(quote) && self.peek_at(1) == Some(quote) {
                        // A long string may end with up to two extra quotes.
                        while self.peek_at(2) == Some(quote) {
                            out.push(quote);
                            self.pos += 1;
                        }
                        self.advance(2);
                        return Ok(out);
                    }
                    out.push(c);
                }
                Some('\\') => {
                    let c = match self.bump() {
                        Some('t') => '\t',
                        Some('b') => '\u{08}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{0C}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.read_hex_char(4, start)?,
                        Some('U') => self.read_hex_char(8, start)?,
                        _ => return Err(self.error_at(start, "invalid escape in string")),
                    };
                    out.push(c);
                }
                Some('\n' | '\r') if !long => {
                    return Err(self.error_at(start, "line break in short string literal"));
                }
                Some(c) => out.push(c),
            }
        }
    }

    /// Reads a blank node label after the `_:` marker.
    pub(crate) fn read_blank_label(&mut self) -> Result<String, RdfError> {
        if !(self.eat('_') && self.eat(':')) {
            return Err(self.expected("blank node label"));
        }
        let mut label = String::new();
        match self.peek() {
            Some(c) if is_pn_chars_u(c) || c.is_ascii_digit() => {
                label.push(c);
                self.pos += 1;
            }
            _ => return Err(self.expected("blank node label character")),
        }
        loop {
            match self.peek() {
                Some(c) if is_pn_chars(c) => {
                    label.push(c);
                    self.pos += 1;
                }
                Some('.') if self.peek_at(1).is_some_and(|c| is_pn_chars(c) || c == '.') => {
                    label.push('.');
                    self.pos += 1;
                }
                _ => return Ok(label),
            }
        }
    }

    /// Reads a language tag after `@`.
    pub(crate) fn read_lang_tag(&mut self) -> Result<String, RdfError> {
        if !self.eat('@') {
            return Err(self.expected("'@'"));
        }
        let start = self.pos;
        let mut tag = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphabetic() {
                tag.push(c);
                self.pos += 1;
            } else {
                break;
            }
        }
        if tag.is_empty() {
            return Err(self.error_at(start, "empty language tag"));
        }
        while self.peek() == Some('-') && self.peek_at(1).is_some_and(|c| c.is_ascii_alphanumeric()) {
            tag.push('-');
            self.pos += 1;
            while let Some(c) = self.peek() {
                if c.is_ascii_alphanumeric() {
                    tag.push(c);
                    self.pos += 1;
                } else {
                    break;
                }
            }
        }
        Ok(tag)
    }
}

fn is_forbidden_in_iri(c: char) -> bool {
    matches!(c, '\u{00}'..='\u{20}' | '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_string_with_trailing_quotes() {
        let mut c = Cursor::new("\"\"\"a\"b\"\"\"\"\" rest");
        assert_eq!(c.read_string(true, true).unwrap(), "a\"b\"\"");
        assert_eq!(c.peek(), Some(' '));
    }

    #[test]
    fn escapes_in_strings_and_iris() {
        let mut c = Cursor::new(r#""é\t\"x""#);
        assert_eq!(c.read_string(true, true).unwrap(), "é\t\"x");
        let mut c = Cursor::new(r"<http://a/é>");
        assert_eq!(c.read_iriref().unwrap(), "http://a/é");
        let mut c = Cursor::new("<http://a b>");
        assert!(c.read_iriref().is_err());
    }

    #[test]
    fn error_location_is_one_based() {
        let c = Cursor::new("ab\ncd");
        match c.error_at(4, "x") {
            RdfError::Syntax { line, column, .. } => assert_eq!((line, column), (2, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn blank_label_does_not_swallow_final_dot() {
        let mut c = Cursor::new("_:b1.");
        assert_eq!(c.read_blank_label().unwrap(), "b1");
        assert_eq!(c.peek(), Some('.'));
    }
}
