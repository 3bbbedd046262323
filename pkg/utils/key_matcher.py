import difflib


class KeyMatcher:
    """
    Fuzzy matching of user-typed names (config keys, noise models, strategies)
    against a closed vocabulary, so typos get a 'did you mean' instead of a bare error.
    """
    def __init__(self, vocabulary, aliases=None, threshold=0.72):
        self.vocabulary = list(vocabulary)
        self.aliases = {k.lower(): v for k, v in (aliases or {}).items()}
        self.threshold = threshold

    def match(self, user_input):
        original_input = user_input
        user_input = str(user_input).strip().lower().replace('-', '_')
        if user_input in self.vocabulary:
            return {'original_input': original_input, 'key': user_input, 'confidence': 1.0, 'suggestion': None}
        if user_input in self.aliases:
            key = self.aliases[user_input]
            return {'original_input': original_input, 'key': key, 'confidence': 1.0, 'suggestion': None}
        best_key = None
        best_score = 0.0
        for candidate in list(self.vocabulary) + list(self.aliases):
            score = difflib.SequenceMatcher(None, user_input, candidate).ratio()
            if score > best_score:
                best_score = score
                best_key = self.aliases.get(candidate, candidate)
        if best_score > self.threshold:
            return {
                'original_input': original_input,
                'key': None,
                'confidence': best_score,
                'suggestion': best_key,
            }
        return {'original_input': original_input, 'key': None, 'confidence': best_score, 'suggestion': None}

    def resolve(self, user_input, what='key'):
        """Exact or aliased match, else an error message carrying the closest candidate."""
        result = self.match(user_input)
        if result['key'] is not None:
            return result['key'], None
        hint = f" (did you mean '{result['suggestion']}'?)" if result['suggestion'] else ''
        return None, f"Unknown {what} '{user_input}'{hint}"
