"""Higher-order library functions, written in the query language so that
they can call CPS functions (and therefore contain checkpoints)."""

from ..runtime.core import _items
from ..runtime.values import PList

SOURCE = r"""
(defm map [f coll & colls]
  (if (empty? colls)
    (loop [xs (seq coll) acc []]
      (if xs
        (recur (next xs) (conj acc (f (first xs))))
        (apply list acc)))
    (loop [cs (cons coll colls) acc []]
      (if (%any-empty? cs)
        (apply list acc)
        (recur (%rests cs) (conj acc (apply f (%firsts cs))))))))

(defm reduce [f x & more]
  (cond
    (empty? more) (let [xs (seq x)]
                    (if xs (reduce f (first xs) (rest xs)) (f)))
    (= (count more) 1) (loop [acc x xs (seq (first more))]
                         (if xs (recur (f acc (first xs)) (next xs)) acc))
    :else (%arity-error "reduce" (+ 2 (count more)))))

(defm filter [pred coll]
  (loop [xs (seq coll) acc []]
    (if xs
      (let [x (first xs)]
        (recur (next xs) (if (pred x) (conj acc x) acc)))
      (apply list acc))))

(defm some [pred coll]
  (loop [xs (seq coll)]
    (when xs
      (let [r (pred (first xs))]
        (if r r (recur (next xs)))))))

(defm repeatedly [n f]
  (loop [i 0 acc []]
    (if (< i n)
      (recur (inc i) (conj acc (f)))
      (apply list acc))))

(defm comp [& fs]
  (let [gs (reverse fs)]
    (if (empty? gs)
      (fn [x] x)
      (fn [& args]
        (loop [v (apply (first gs) args) hs (next gs)]
          (if hs (recur ((first hs) v) (next hs)) v))))))

(defm partial [f & args]
  (fn [& more] (apply f (concat args more))))
"""


def _any_empty(colls):
    return any(not _items(c) for c in _items(colls))


def _firsts(colls):
    return PList(_items(c)[0] for c in _items(colls))


def _rests(colls):
    return PList(PList(_items(c)[1:]) for c in _items(colls))


def _arity_error(name, n):
    from .emit import QueryError
    raise QueryError(f"wrong number of arguments ({n}) passed to {name}")


HELPERS = {
    "%any-empty?": _any_empty,
    "%firsts": _firsts,
    "%rests": _rests,
    "%arity-error": _arity_error,
}


def _build():
    from .program import load_program
    program = load_program(SOURCE, "<prelude>", library={}, host=HELPERS,
                           extra_primitives=HELPERS)
    return program.globals


LIBRARY = _build()
