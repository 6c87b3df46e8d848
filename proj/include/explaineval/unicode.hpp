#pragma once
// Text normalization and the codepoint classification used by the tokenizer.

#include <string>
#include <string_view>
#include <vector>

namespace explaineval {

// Canonical-composition (NFC) normalization. All text fields pass through
// this at ingest so metric results do not depend on the source encoding's
// composition form.
std::string nfc_normalize(std::string_view utf8);

// Decodes UTF-8 into codepoints. Invalid bytes decode as U+FFFD.
std::vector<char32_t> decode_utf8(std::string_view utf8);

std::string encode_utf8(const std::vector<char32_t>& codepoints);
void append_utf8(std::string& out, char32_t cp);

// Han ideographs, kana and Hangul syllables: scripts tokenized per codepoint.
bool is_cjk(char32_t cp);

// Letters and digits outside the CJK ranges; contiguous runs form one token.
bool is_word_char(char32_t cp);

bool is_space(char32_t cp);

}  // namespace explaineval
