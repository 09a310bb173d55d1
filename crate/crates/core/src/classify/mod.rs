//! Headline classifiers producing [`LabelRecord`](crate::corpus::LabelRecord)s.
//!
//! Two backends: a local word-list classifier and a chat-completion gateway
//! with a replayable cache. Term-frequency reports describe what each label
//! class talks about.

mod lexicon;
mod llm;
mod text;

pub use lexicon::{lexicon_classify, Lexicon, LEXICON_SOURCE};
pub use llm::{
    llm_classify, CacheEntry, CacheKey, ChatMessage, ChatRequest, ChatTransport, EndpointConfig,
    GatewayOptions, HttpTransport, LabelCache, PromptTemplate, PLACEHOLDER,
};
pub use text::{stem, stopwords, term_frequency_report, tokenize, TermFrequency, DEFAULT_MIN_COUNT};
