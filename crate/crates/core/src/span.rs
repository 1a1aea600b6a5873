use std::fmt;
use std::sync::Arc;

/// Location of a token or node in a source file.
///
/// Spans never take part in node equality: two ASTs that differ only in
/// where their nodes came from compare equal. This is what the parse/unparse
/// round trip relies on.
#[derive(Clone, Debug, Default)]
pub struct SourceSpan {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
    pub len: u32,
}

impl SourceSpan {
    pub fn new(file: Arc<str>, line: u32, col: u32, len: u32) -> Self {
        debug_assert!(line >= 1 && col >= 1);
        SourceSpan { file, line, col, len }
    }

    /// Span for nodes created by the tool rather than read from a file.
    pub fn synthetic() -> Self {
        SourceSpan { file: Arc::from("<synthetic>"), line: 1, col: 1, len: 0 }
    }
}

impl PartialEq for SourceSpan {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

impl Eq for SourceSpan {}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}
