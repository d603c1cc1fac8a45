use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    #[error("empty language tag")]
    Empty,
    #[error("malformed language tag {0:?}")]
    Malformed(String),
}

/// Case-normalizes a language tag and maps `syc` to the `syr` macrolanguage.
///
/// Returns the normalized tag and whether the `syc` substitution happened.
pub fn normalize_lang(tag: &str) -> Result<(String, bool), LangError> {
    if tag.is_empty() {
        return Err(LangError::Empty);
    }
    let mut out = Vec::new();
    let mut warned = false;
    for (i, sub) in tag.split('-').enumerate() {
        if sub.is_empty() || sub.len() > 8 || !sub.bytes().all(|b| b.is_ascii_alphanumeric()) {
            return Err(LangError::Malformed(tag.to_string()));
        }
        let norm = if i == 0 {
            let lower = sub.to_ascii_lowercase();
            if lower == "syc" {
                warned = true;
                "syr".to_string()
            } else {
                lower
            }
        } else if sub.len() == 4 && sub.bytes().all(|b| b.is_ascii_alphabetic()) {
            let mut s = sub.to_ascii_lowercase();
            s[..1].make_ascii_uppercase();
            s
        } else if sub.len() == 2 && sub.bytes().all(|b| b.is_ascii_alphabetic()) {
            sub.to_ascii_uppercase()
        } else {
            sub.to_ascii_lowercase()
        };
        out.push(norm);
    }
    Ok((out.join("-"), warned))
}

/// True when the primary subtag of `tag` is `syc`, in any case.
pub(crate) fn is_syc(tag: &str) -> bool {
    tag.split('-').next().is_some_and(|p| p.eq_ignore_ascii_case("syc"))
}
