# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tokenizer hot loops: basic pre-splitting and greedy
longest-match WordPiece.

Byte-for-byte equivalent to the pure-Python twins in ``tokenizer.py``;
selected automatically at import when the build produced this module.
"""
from cpython.unicode cimport Py_UNICODE_ISSPACE, Py_UNICODE_ISALNUM


def pre_split(str text):
    """Whitespace + punctuation pre-tokenization (BERT basic style)."""
    cdef Py_ssize_t n = len(text)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t run_start = -1
    cdef Py_UCS4 ch
    cdef list words = []
    for i in range(n):
        ch = text[i]
        if Py_UNICODE_ISSPACE(ch):
            if run_start >= 0:
                words.append(text[run_start:i])
                run_start = -1
        elif Py_UNICODE_ISALNUM(ch):
            if run_start < 0:
                run_start = i
        else:
            if run_start >= 0:
                words.append(text[run_start:i])
                run_start = -1
            words.append(text[i:i + 1])
    if run_start >= 0:
        words.append(text[run_start:n])
    return words


def split_word(str word, dict token_ids, dict continuation_forms, str unk,
               Py_ssize_t max_chars):
    # continuation_forms maps prefix-stripped piece text to the stored
    # vocabulary token, so the inner loop never concatenates strings
    cdef Py_ssize_t n = len(word)
    cdef Py_ssize_t start = 0
    cdef Py_ssize_t end
    if n > max_chars:
        return [unk]
    if word in token_ids:
        return [word]
    pieces = []
    while start < n:
        end = n
        found = None
        if start == 0:
            while start < end:
                piece = word[:end]
                if piece in token_ids:
                    found = piece
                    break
                end -= 1
        else:
            while start < end:
                piece = word[start:end]
                stored = continuation_forms.get(piece)
                if stored is not None:
                    found = stored
                    break
                end -= 1
        if found is None:
            return [unk]
        pieces.append(found)
        start = end
    return pieces


def split_words(list words, dict token_ids, dict continuation_forms, str unk,
                Py_ssize_t max_chars):
    cdef list out = []
    for word in words:
        out.extend(split_word(word, token_ids, continuation_forms, unk, max_chars))
    return out
