from reqlens.lexer import TokenKind, join_lexemes, tokenize


def kinds(text):
    return [(t.kind, t.lexeme) for t in tokenize(text)]


def test_keywords_identifiers_and_symbols():
    assert kinds("require x := y.z /= w") == [
        (TokenKind.KEYWORD, "require"), (TokenKind.IDENTIFIER, "x"),
        (TokenKind.SYMBOL, ":="), (TokenKind.IDENTIFIER, "y"),
        (TokenKind.SYMBOL, "."), (TokenKind.IDENTIFIER, "z"),
        (TokenKind.SYMBOL, "/="), (TokenKind.IDENTIFIER, "w"),
    ]


def test_comments_are_kept_as_tokens():
    toks = tokenize("a -- trailing remark\nb")
    assert [t.kind for t in toks] == [TokenKind.IDENTIFIER, TokenKind.COMMENT,
                                      TokenKind.IDENTIFIER]
    assert toks[1].lexeme == "-- trailing remark"


def test_locations_are_one_based():
    toks = tokenize("class A\n  feature", "f.rsl")
    assert [(t.location.line, t.location.column) for t in toks] == [(1, 1), (1, 7), (2, 3)]
    assert toks[0].location.file == "f.rsl"


def test_literals():
    assert kinds('"Ted" 42 3.5') == [
        (TokenKind.STRING, '"Ted"'), (TokenKind.INTEGER, "42"), (TokenKind.REAL, "3.5")]


def test_bad_input_becomes_error_tokens():
    assert kinds("a ` b")[1] == (TokenKind.ERROR, "`")
    assert kinds('"open\nx')[0] == (TokenKind.ERROR, '"open')


def test_token_offsets_cover_the_input():
    text = "create b.make(\"x\", y) -- c"
    for t in tokenize(text):
        assert text[t.offset:t.end] == t.lexeme


def test_join_lexemes_spacing():
    assert join_lexemes(["create", "b", ".", "make", "(", '"a"', ",", "c", ")"]) == \
        'create b.make ("a", c)'
