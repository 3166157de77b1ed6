from collections import Counter
from typing import List, Tuple


def tokenize(text: str) -> List[str]:
    words: List[str] = text.lower().split()
    return words


def top_words(words: List[str], n: int = 10) -> List[Tuple[str, int]]:
    counter: Counter = Counter(words)
    pairs: List[Tuple[str, int]] = counter.most_common(n)
    return pairs


def average_length(words: List[str]) -> float:
    if not words:
        return 0.0
    total: int = sum(len(w) for w in words)
    return total / len(words)


def is_palindrome(word: str) -> bool:
    cleaned: str = word.lower()
    return cleaned == cleaned[::-1]


STOPWORDS: set[str] = {"a", "an", "the", "of"}
WINDOW: Tuple[int, int] = (2, 5)
