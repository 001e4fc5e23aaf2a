//! The grapheme symbol table shared across the pipeline.

use alloc::collections::BTreeMap;
use alloc::string::ToString;
use alloc::vec::Vec;

use crate::CoreError;

/// An ordered grapheme table plus one reserved blank position.
///
/// Symbol indices cover `0..size()`, where `size()` counts the graphemes
/// plus the blank. The blank is not a grapheme: `char_at(blank_index())`
/// is `None`. One alphabet instance is built at pipeline start and shared
/// by reference everywhere, so simulator, scorer, and dictionary agree on
/// the index space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    graphemes: Vec<char>,
    blank_index: usize,
    index_of: BTreeMap<char, usize>,
}

impl Alphabet {
    /// Builds an alphabet from graphemes and a blank position.
    ///
    /// `blank_index` names the slot the blank occupies in the combined
    /// table; graphemes keep their given order around it. Graphemes must
    /// be unique and at least one is required.
    pub fn new(
        graphemes: impl IntoIterator<Item = char>,
        blank_index: usize,
    ) -> Result<Self, CoreError> {
        let graphemes: Vec<char> = graphemes.into_iter().collect();
        if graphemes.is_empty() {
            return Err(CoreError::InvalidAlphabet(
                "at least one grapheme is required".to_string(),
            ));
        }
        if blank_index > graphemes.len() {
            return Err(CoreError::InvalidAlphabet(alloc::format!(
                "blank index {} out of range for {} graphemes",
                blank_index,
                graphemes.len()
            )));
        }
        let mut index_of = BTreeMap::new();
        for (i, &ch) in graphemes.iter().enumerate() {
            let table_index = if i >= blank_index { i + 1 } else { i };
            if index_of.insert(ch, table_index).is_some() {
                return Err(CoreError::InvalidAlphabet(alloc::format!(
                    "duplicate grapheme {ch:?}"
                )));
            }
        }
        Ok(Self {
            graphemes,
            blank_index,
            index_of,
        })
    }

    /// The standard lowercase grapheme alphabet: blank at index 0, then
    /// `a`..`z`, space, apostrophe. Size 29.
    pub fn standard() -> Self {
        let graphemes = ('a'..='z').chain([' ', '\'']);
        Self::new(graphemes, 0).expect("standard alphabet is valid")
    }

    /// Table size including the blank.
    pub fn size(&self) -> usize {
        self.graphemes.len() + 1
    }

    /// Index reserved for the CTC blank.
    pub fn blank_index(&self) -> usize {
        self.blank_index
    }

    /// Grapheme at a table index, or `None` for the blank.
    pub fn char_at(&self, index: usize) -> Option<char> {
        if index == self.blank_index {
            return None;
        }
        let g = if index > self.blank_index {
            index - 1
        } else {
            index
        };
        self.graphemes.get(g).copied()
    }

    /// Table index of a grapheme, or `None` if it is not in the alphabet.
    pub fn index_of(&self, ch: char) -> Option<usize> {
        self.index_of.get(&ch).copied()
    }

    /// The graphemes in table order (blank excluded).
    pub fn graphemes(&self) -> &[char] {
        &self.graphemes
    }

    /// Checks that every character of `text` is a grapheme of this alphabet.
    pub fn validate_text(&self, text: &str) -> Result<(), CoreError> {
        match text.chars().find(|ch| !self.index_of.contains_key(ch)) {
            Some(ch) => Err(CoreError::CharNotInAlphabet(ch)),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_alphabet_layout() {
        let a = Alphabet::standard();
        assert_eq!(a.size(), 29);
        assert_eq!(a.blank_index(), 0);
        assert_eq!(a.char_at(0), None);
        assert_eq!(a.char_at(1), Some('a'));
        assert_eq!(a.char_at(26), Some('z'));
        assert_eq!(a.char_at(27), Some(' '));
        assert_eq!(a.char_at(28), Some('\''));
        assert_eq!(a.index_of('a'), Some(1));
        assert_eq!(a.index_of(' '), Some(27));
        assert_eq!(a.index_of('!'), None);
    }

    #[test]
    fn blank_in_the_middle() {
        let a = Alphabet::new(['a', 'b'], 1).unwrap();
        assert_eq!(a.size(), 3);
        assert_eq!(a.char_at(0), Some('a'));
        assert_eq!(a.char_at(1), None);
        assert_eq!(a.char_at(2), Some('b'));
        assert_eq!(a.index_of('b'), Some(2));
    }

    #[test]
    fn rejects_duplicates_and_empty() {
        assert!(Alphabet::new(['a', 'a'], 0).is_err());
        assert!(Alphabet::new([], 0).is_err());
        assert!(Alphabet::new(['a'], 2).is_err());
    }

    #[test]
    fn validate_text_flags_foreign_chars() {
        let a = Alphabet::standard();
        assert!(a.validate_text("play music").is_ok());
        assert_eq!(
            a.validate_text("play?"),
            Err(CoreError::CharNotInAlphabet('?'))
        );
    }
}
