use std::fmt;

use crate::error::{Error, Result};

/// A labeled constituency tree. Leaf nodes carry the token text in `leaf`
/// (and as their label) and have no children.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub leaf: Option<String>,
}

impl ParseTree {
    pub fn leaf(word: impl Into<String>) -> Self {
        let word = word.into();
        ParseTree {
            label: word.clone(),
            children: Vec::new(),
            leaf: Some(word),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree {
            label: label.into(),
            children,
            leaf: None,
        }
    }

    pub fn preterminal(tag: impl Into<String>, word: impl Into<String>) -> Self {
        ParseTree::node(tag, vec![ParseTree::leaf(word)])
    }

    pub fn is_leaf(&self) -> bool {
        self.leaf.is_some()
    }

    pub fn is_preterminal(&self) -> bool {
        self.children.len() == 1 && self.children[0].is_leaf()
    }

    /// Leaves sit at depth 0, so a lone preterminal has depth 1.
    pub fn depth(&self) -> usize {
        if self.is_leaf() {
            0
        } else {
            1 + self.children.iter().map(ParseTree::depth).max().unwrap_or(0)
        }
    }

    /// `(tag, word)` pairs in left-to-right order.
    pub fn tagged_words(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        self.collect_tagged(&mut out);
        out
    }

    fn collect_tagged<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        if self.is_preterminal() {
            out.push((self.label.as_str(), self.children[0].label.as_str()));
        } else {
            for c in &self.children {
                c.collect_tagged(out);
            }
        }
    }

    pub fn preterminal_count(&self) -> usize {
        if self.is_preterminal() {
            1
        } else {
            self.children.iter().map(ParseTree::preterminal_count).sum()
        }
    }

    /// Drop an unlabeled or `ROOT` wrapper around a single constituent.
    pub fn unwrap_root(&self) -> &ParseTree {
        if (self.label.is_empty() || self.label == "ROOT" || self.label == "TOP")
            && self.children.len() == 1
            && !self.children[0].is_leaf()
        {
            &self.children[0]
        } else {
            self
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ParseTree::node_count).sum::<usize>()
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(word) = &self.leaf {
            return f.write_str(word);
        }
        write!(f, "({}", self.label)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, PartialEq)]
enum Lexeme<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn lex(text: &str) -> Vec<(usize, Lexeme<'_>)> {
    let mut out = Vec::new();
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'(' => {
                out.push((i, Lexeme::Open));
                i += 1;
            }
            b')' => {
                out.push((i, Lexeme::Close));
                i += 1;
            }
            c if c.is_ascii_whitespace() => i += 1,
            _ => {
                let start = i;
                while i < bytes.len() && !matches!(bytes[i], b'(' | b')') && !bytes[i].is_ascii_whitespace() {
                    i += 1;
                }
                out.push((start, Lexeme::Atom(&text[start..i])));
            }
        }
    }
    out
}

/// Parse one Penn-style bracketed tree.
pub fn parse_bracketed(text: &str) -> Result<ParseTree> {
    let lexemes = lex(text);
    let mut pos = 0;
    let tree = parse_node(&lexemes, &mut pos, text.len())?;
    if let Some((offset, _)) = lexemes.get(pos) {
        return Err(Error::Tree {
            offset: *offset,
            message: "trailing input after tree".into(),
        });
    }
    Ok(tree)
}

fn parse_node(lexemes: &[(usize, Lexeme<'_>)], pos: &mut usize, end: usize) -> Result<ParseTree> {
    let open_at = match lexemes.get(*pos) {
        Some((o, Lexeme::Open)) => *o,
        Some((o, _)) => {
            return Err(Error::Tree {
                offset: *o,
                message: "expected '('".into(),
            })
        }
        None => {
            return Err(Error::Tree {
                offset: end,
                message: "empty input".into(),
            })
        }
    };
    *pos += 1;
    let label = match lexemes.get(*pos) {
        Some((_, Lexeme::Atom(a))) => {
            *pos += 1;
            a.to_string()
        }
        _ => String::new(),
    };
    let mut children = Vec::new();
    loop {
        match lexemes.get(*pos) {
            None => {
                return Err(Error::Tree {
                    offset: end,
                    message: format!("unbalanced brackets: node opened at {open_at} never closed"),
                })
            }
            Some((_, Lexeme::Close)) => {
                *pos += 1;
                break;
            }
            Some((_, Lexeme::Atom(a))) => {
                children.push(ParseTree::leaf(*a));
                *pos += 1;
            }
            Some((_, Lexeme::Open)) => children.push(parse_node(lexemes, pos, end)?),
        }
    }
    if children.is_empty() {
        return Err(Error::Tree {
            offset: open_at,
            message: "empty node".into(),
        });
    }
    Ok(ParseTree::node(label, children))
}

/// Read a `.trees` file: one tree per participant utterance, blank line for
/// an utterance without a parse. Missing trailing lines mean no parse.
pub fn parse_trees_file(text: &str, utterances: usize) -> Result<Vec<Option<ParseTree>>> {
    let lines: Vec<&str> = text.lines().collect();
    let extra = lines.iter().skip(utterances).any(|l| !l.trim().is_empty());
    if extra {
        return Err(Error::data(format!(
            "trees file has more than {utterances} non-empty lines"
        )));
    }
    let mut out = Vec::with_capacity(utterances);
    for i in 0..utterances {
        match lines.get(i).map(|l| l.trim()) {
            Some(l) if !l.is_empty() => out.push(Some(parse_bracketed(l).map_err(|e| {
                Error::data(format!("trees line {}: {e}", i + 1))
            })?)),
            _ => out.push(None),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_tree() {
        let t = parse_bracketed("(S (NP (DT the) (NN boy)) (VP (VBZ runs)))").unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(t.preterminal_count(), 3);
        assert_eq!(t.tagged_words(), [("DT", "the"), ("NN", "boy"), ("VBZ", "runs")]);
        assert_eq!(t.to_string(), "(S (NP (DT the) (NN boy)) (VP (VBZ runs)))");
    }

    #[test]
    fn unbalanced() {
        let err = parse_bracketed("(X a").unwrap_err();
        assert!(matches!(err, Error::Tree { offset: 4, .. }), "{err}");
        assert!(parse_bracketed("(X a))").is_err());
    }

    #[test]
    fn empty_node() {
        assert!(matches!(
            parse_bracketed("(S (NP) (VP (VB go)))"),
            Err(Error::Tree { offset: 3, .. })
        ));
        assert!(parse_bracketed("").is_err());
        assert!(parse_bracketed("()").is_err());
    }

    #[test]
    fn root_wrapper() {
        let t = parse_bracketed("(ROOT (S (VP (VB go))))").unwrap();
        assert_eq!(t.unwrap_root().label, "S");
        let t = parse_bracketed("( (S (VP (VB go))))").unwrap();
        assert_eq!(t.label, "");
        assert_eq!(t.unwrap_root().label, "S");
    }

    #[test]
    fn single_preterminal_depth() {
        assert_eq!(parse_bracketed("(NN boy)").unwrap().depth(), 1);
    }

    #[test]
    fn trees_file_blank_lines() {
        let trees = parse_trees_file("(S (VP (VB go)))\n\n(NP (NN boy))\n", 4).unwrap();
        assert!(trees[0].is_some() && trees[1].is_none() && trees[2].is_some() && trees[3].is_none());
        assert!(parse_trees_file("(NN a)\n(NN b)\n", 1).is_err());
    }
}
