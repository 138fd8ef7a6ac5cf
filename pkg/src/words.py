

# -- leaf-approximation words ----------------------------------------------------


@dataclass(frozen=True)
class MarkedWord:
    """Word of a closed-up leaf approximation: the flipped extreme-start
    p_k/q_k-word followed by the first q_k - 1 blocks of the unflipped one.
    ``marker`` is the index of the flipped block; ``verified`` says whether
    both oracle verdicts were computed (None when the word was too long)."""

    k: int
    word: CyclicBlockWord
    marker: int
    verified: Optional[bool]

    def to_json(self) -> dict:
        return {"k": self.k, "word": self.word.to_json(), "marker": str(self.marker),
                "verified": self.verified}


def leaf_segment_word(theta: Real, k: int, verify_limit: int = 200_000) -> MarkedWord:
    if k < 2:
        raise ValueError("k must be >= 2")
    cf = cf_expand(theta)
    p, q = cf.p(k), cf.q(k)
    n = math.floor(theta)
    l1 = q if k % 2 == 0 else 1
    new = n if k % 2 == 0 else n + 1
    if rational_block(p, q, l1, q - 1) == new:
        raise ArithmeticError("extreme-start word does not end with the expected block")
    word = CyclicBlockWord(p, q, l1, 2 * q - 1, ((q - 1, new),))
    verified = None
    if q <= verify_limit:
        head = [rational_block(p, q, l1, j) for j in range(q)]
        if block_start_interval(head, theta) is None:
            raise ArithmeticError("unflipped word rejected by the oracle")
        head[-1] = new
        if block_start_interval(head, theta) is not None:
            raise ArithmeticError("flipped word accepted by the oracle")
        verified = True
    return MarkedWord(k, word, q - 1, verified)
