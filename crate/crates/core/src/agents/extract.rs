#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtractError {
    #[error("no code block in the response")]
    NoCode,
}

/// Contents of the last fenced block; a bare response is accepted only when
/// it already looks like C.
pub fn extract_code(response: &str) -> Result<String, ExtractError> {
    let mut blocks = Vec::new();
    let mut open: Option<(usize, Vec<&str>)> = None;
    for line in response.lines() {
        let trimmed = line.trim_start();
        match &mut open {
            None => {
                if trimmed.starts_with("```") {
                    open = Some((fence_len(trimmed), Vec::new()));
                }
            }
            Some((len, body)) => {
                if trimmed.starts_with(&"`".repeat(*len)) && trimmed.trim_matches('`').trim().is_empty() {
                    blocks.push(body.join("\n"));
                    open = None;
                } else {
                    body.push(line);
                }
            }
        }
    }
    // a response cut off inside its final fence still carries the code
    if let Some((_, body)) = open {
        blocks.push(body.join("\n"));
    }
    if let Some(last) = blocks.into_iter().rev().find(|b| !b.trim().is_empty()) {
        return Ok(with_newline(last));
    }
    if looks_like_c(response) {
        return Ok(with_newline(response.trim().to_string()));
    }
    Err(ExtractError::NoCode)
}

fn fence_len(line: &str) -> usize {
    line.chars().take_while(|&c| c == '`').count()
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn looks_like_c(text: &str) -> bool {
    let text = text.trim_start();
    let first = text.split(|c: char| c.is_whitespace() || c == '(' || c == '*').next().unwrap_or_default();
    let starts_like_c = text.starts_with('#')
        || text.starts_with("/*")
        || text.starts_with("//")
        || matches!(
            first,
            "void" | "int" | "unsigned" | "signed" | "char" | "short" | "long" | "float" | "double" | "static"
                | "inline" | "const" | "typedef" | "struct" | "extern"
        )
        || first.ends_with("_t");
    starts_like_c && text.contains('{') && text.contains('}')
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_fence() {
        let r = "Here you go:\n```c\nvoid f(void) {}\n```\n";
        assert_eq!(extract_code(r).unwrap(), "void f(void) {}\n");
    }

    #[test]
    fn last_fence_wins() {
        let r = "Draft:\n```c\nint draft;\n```\nFinal version:\n```\nint final_one;\n```\nDone.";
        assert_eq!(extract_code(r).unwrap(), "int final_one;\n");
    }

    #[test]
    fn prose_is_rejected() {
        assert_eq!(extract_code("I'm sorry, I cannot help with that."), Err(ExtractError::NoCode));
        assert_eq!(extract_code(""), Err(ExtractError::NoCode));
    }

    #[test]
    fn bare_c_is_accepted() {
        let r = "#include <riscv_vector.h>\nvoid f(void) { }\n";
        assert_eq!(extract_code(r).unwrap(), r);
    }

    #[test]
    fn longer_fences_nest_shorter_ones() {
        let r = "````c\n/* ```not a fence``` */\nint x;\n````\n";
        assert_eq!(extract_code(r).unwrap(), "/* ```not a fence``` */\nint x;\n");
    }

    #[test]
    fn unterminated_fence() {
        let r = "```c\nvoid f(void) {\n}\n";
        assert_eq!(extract_code(r).unwrap(), "void f(void) {\n}\n");
    }
}
