//! Line-oriented helpers shared by the text formats.

use crate::error::{Error, Result};

/// A non-blank line with its 1-based line number, comment removed.
#[derive(Debug, Clone, Copy)]
pub struct Line<'a> {
    pub number: usize,
    pub text: &'a str,
}

fn strip_comment(line: &str) -> &str {
    let bytes = line.as_bytes();
    for (i, b) in bytes.iter().enumerate() {
        if *b == b'#' && (i == 0 || bytes[i - 1].is_ascii_whitespace()) {
            return &line[..i];
        }
    }
    line
}

pub fn lines(input: &str) -> Vec<Line<'_>> {
    lines_from(input, 1)
}

pub fn lines_from(input: &str, first: usize) -> Vec<Line<'_>> {
    input
        .lines()
        .enumerate()
        .filter_map(|(i, raw)| {
            let text = strip_comment(raw).trim();
            (!text.is_empty()).then_some(Line {
                number: i + first,
                text,
            })
        })
        .collect()
}

/// A named block introduced by a `NAME:` header line.
#[derive(Debug, Clone)]
pub struct Block<'a> {
    pub name: String,
    pub header_line: usize,
    /// Text after the colon on the header line, if any.
    pub inline: &'a str,
    pub lines: Vec<Line<'a>>,
}

/// Splits lines into blocks whose header is one of `names` immediately
/// followed by `:`.
/// Lines before the first header are returned as the preamble.
pub fn split_blocks<'a>(lines: &[Line<'a>], names: &[&str]) -> (Vec<Line<'a>>, Vec<Block<'a>>) {
    let mut preamble = Vec::new();
    let mut blocks: Vec<Block<'a>> = Vec::new();
    for line in lines {
        // `L:` is a header, `L : x` is content
        let header = line
            .text
            .split_once(':')
            .and_then(|(head, rest)| names.contains(&head).then_some((head, rest.trim())));
        match header {
            Some((name, inline)) => blocks.push(Block {
                name: name.to_string(),
                header_line: line.number,
                inline,
                lines: Vec::new(),
            }),
            None => match blocks.last_mut() {
                Some(b) => b.lines.push(*line),
                None => preamble.push(*line),
            },
        }
    }
    (preamble, blocks)
}

/// Groups lines into upper-case sections (`NODES`, `EQNS`, ...). A section
/// header may carry content on the same line (`SORTS N`).
pub fn sections<'a>(
    lines: &[Line<'a>],
    known: &[&str],
) -> Result<Vec<(String, Vec<Line<'a>>)>> {
    let mut out: Vec<(String, Vec<Line<'a>>)> = Vec::new();
    for line in lines {
        let (head, rest) = match line.text.split_once(char::is_whitespace) {
            Some((h, r)) => (h, r.trim()),
            None => (line.text, ""),
        };
        if known.contains(&head) {
            out.push((head.to_string(), Vec::new()));
            if !rest.is_empty() {
                out.last_mut().unwrap().1.push(Line {
                    number: line.number,
                    text: rest,
                });
            }
            continue;
        }
        match out.last_mut() {
            Some((_, body)) => body.push(*line),
            None => {
                return Err(Error::parse(
                    line.number,
                    format!("expected one of {} before `{}`", known.join(", "), line.text),
                ))
            }
        }
    }
    Ok(out)
}

pub fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '\'' | '|' | '-'))
        && !s.contains("->")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_are_dropped() {
        let ls = lines("# header\n\nNODES   # trailing\n a : x#y\n");
        assert_eq!(ls.len(), 2);
        assert_eq!(ls[0].text, "NODES");
        assert_eq!(ls[0].number, 3);
        assert_eq!(ls[1].text, "a : x#y");
    }

    #[test]
    fn blocks_split_on_headers() {
        let ls = lines("RULE r\nL:\nNODES\nK: \nR:\nl:\n");
        let (pre, blocks) = split_blocks(&ls, &["L", "K", "R", "l", "r"]);
        assert_eq!(pre.len(), 1);
        let names: Vec<_> = blocks.iter().map(|b| b.name.as_str()).collect();
        assert_eq!(names, ["L", "K", "R", "l"]);
        assert_eq!(blocks[0].lines.len(), 1);
    }
}
