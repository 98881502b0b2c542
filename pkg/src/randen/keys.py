"""Round-key material for the permutation.

The schedule is 136 16-byte keys (2176 bytes): 8 keys per round across 17
rounds, consumed in order, so key ``8*r + p`` feeds branch pair ``p`` of
round ``r``.  The built-in schedule is the binary fraction of pi, a
nothing-up-my-sleeve constant; a user-supplied file must contain exactly the
same 2176 raw bytes of material laid out the same way.
"""

from __future__ import annotations

import io
import os

KEY_BYTES = 16
KEYS_PER_ROUND = 8
NUM_ROUNDS = 17
NUM_KEYS = KEYS_PER_ROUND * NUM_ROUNDS  # 136
SCHEDULE_BYTES = NUM_KEYS * KEY_BYTES  # 2176

BUILTIN_SOURCE = "builtin-pi"


class KeyLengthError(ValueError):
    """Key material is not exactly 2176 bytes."""


# First 2176 fractional bytes of pi, most significant byte first.  Verified
# in the tests by an independent arbitrary-precision computation.
_PI_FRACTION_HEX = """
243f6a8885a308d313198a2e03707344a4093822299f31d0082efa98ec4e6c89
452821e638d01377be5466cf34e90c6cc0ac29b7c97c50dd3f84d5b5b5470917
9216d5d98979fb1bd1310ba698dfb5ac2ffd72dbd01adfb7b8e1afed6a267e96
ba7c9045f12c7f9924a19947b3916cf70801f2e2858efc16636920d871574e69
a458fea3f4933d7e0d95748f728eb658718bcd5882154aee7b54a41dc25a59b5
9c30d5392af26013c5d1b023286085f0ca417918b8db38ef8e79dcb0603a180e
6c9e0e8bb01e8a3ed71577c1bd314b2778af2fda55605c60e65525f3aa55ab94
5748986263e8144055ca396a2aab10b6b4cc5c341141e8cea15486af7c72e993
b3ee1411636fbc2a2ba9c55d741831f6ce5c3e169b87931eafd6ba336c24cf5c
7a325381289586773b8f48986b4bb9afc4bfe81b6628219361d809ccfb21a991
487cac605dec8032ef845d5de98575b1dc262302eb651b8823893e81d396acc5
0f6d6ff383f442392e0b4482a484200469c8f04a9e1f9b5e21c66842f6e96c9a
670c9c61abd388f06a51a0d2d8542f68960fa728ab5133a36eef0b6c137a3be4
ba3bf0507efb2a98a1f1651d39af017666ca593e82430e888cee8619456f9fb4
7d84a5c33b8b5ebee06f75d885c12073401a449f56c16aa64ed3aa62363f7706
1bfedf72429b023d37d0d724d00a1248db0fead349f1c09b075372c980991b7b
25d479d8f6e8def7e3fe501ab6794c3b976ce0bd04c006bac1a94fb6409f60c4
5e5c9ec2196a246368fb6faf3e6c53b51339b2eb3b52ec6f6dfc511f9b30952c
cc814544af5ebd09bee3d004de334afd660f2807192e4bb3c0cba85745c8740f
d20b5f39b9d3fbdb5579c0bd1a60320ad6a100c6402c7279679f25fefb1fa3cc
8ea5e9f8db3222f83c7516dffd616b152f501ec8ad0552ab323db5fafd238760
53317b483e00df829e5c57bbca6f8ca01a87562edf1769dbd542a8f6287effc3
ac6732c68c4f5573695b27b0bbca58c8e1ffa35db8f011a010fa3d98fd2183b8
4afcb56c2dd1d35b9a53e479b6f84565d28e49bc4bfb9790e1ddf2daa4cb7e33
62fb1341cee4c6e8ef20cada36774c01d07e9efe2bf11fb495dbda4dae909198
eaad8e716b93d5a0d08ed1d0afc725e08e3c5b2f8e7594b78ff6e2fbf2122b64
8888b812900df01c4fad5ea0688fc31cd1cff191b3a8c1ad2f2f2218be0e1777
ea752dfe8b021fa1e5a0cc0fb56f74e818acf3d6ce89e299b4a84fe0fd13e0b7
7cc43b81d2ada8d9165fa2668095770593cc7314211a1477e6ad206577b5fa86
c75442f5fb9d35cfebcdaf0c7b3e89a0d6411bd3ae1e7e4900250e2d2071b35e
226800bb57b8e0af2464369bf009b91e5563911d59dfa6aa78c14389d95a537f
207d5ba202e5b9c5832603766295cfa911c819684e734a41b3472dca7b14a94a
1b5100529a532915d60f573fbc9bc6e42b60a47681e6740008ba6fb5571be91f
f296ec6b2a0dd915b6636521e7b9f9b6ff34052ec585566453b02d5da99f8fa1
08ba47996e85076a4b7a70e9b5b32944db75092ec4192623ad6ea6b049a7df7d
9cee60b88fedb266ecaa8c71699a17ff5664526cc2b19ee1193602a575094c29
a0591340e4183a3e3f54989a5b429d656b8fe4d699f73fd6a1d29c07efe830f5
4d2d38e6f0255dc14cdd20868470eb266382e9c6021ecc5e09686b3f3ebaefc9
3c9718146b6a70a1687f358452a0e286b79c5305aa5007373e07841c7fdeae5c
8e7d44ec5716f2b8b03ada37f0500c0df01c1f040200b3ffae0cf51a3cb574b2
25837a58dc0921bdd19113f97ca92ff69432477322f547013ae5e58137c2dadc
c8b576349af3dda7a94461460fd0030eecc8c73ea4751e41e238cd993bea0e2f
3280bba1183eb3314e548b384f6db9086f420d03f60a04bf2cb8129024977c79
5679b072bcaf89afde9a771fd9930810b38bae12dccf3f2e5512721f2e6b7124
501adde69f84cd877a5847187408da17bc9f9abce94b7d8cec7aec3adb851dfa
63094366c464c3d2ef1c18473215d908dd433b3724c2ba1612a14d432a65c451
50940002133ae4dd71dff89e10314e5581ac77d65f11199b043556f1d7a3c76b
3c11183b5924a509f28fe6ed97f1fbfa9ebabf2c1e153c6e86e34570eae96fb1
860e5e0a5a3e2ab3771fe71c4e3d06fa2965dcb999e71d0f803e89d65266c825
2e4cc9789c10b36ac6150eba94e2ea78a5fc3c531e0a2df4f2f74ea7361d2b3d
1939260f19c279605223a708f71312b6ebadfe6eeac31f66e3bc4595a67bc883
b17f37d1018cff28c332ddefbe6c5aa56558218568ab9802eecea50fdb2f953b
2aef7dad5b6e2f841521b62829076170ecdd4775619f151013cca830eb61bd96
0334fe1eaa0363cfb5735c904c70a239d59e9e0bcbaade14eecc86bc60622ca7
9cab5cabb2f3846e648b1eaf19bdf0caa02369b9655abb5040685a323c2ab4b3
319ee9d5c021b8f79b540b19875fa09995f7997e623d7da8f837889a97e32d77
11ed935f166812810e358829c7e61fd696dedfa17858ba9957f584a51b227263
9b83c3ff1ac24696cdb30aeb532e30548fd948e46dbc312858ebf2ef34c6ffea
fe28ed61ee7c3c735d4a14d9e864b7e342105d14203e13e045eee2b6a3aaabea
db6c4f15facb4fd0c742f442ef6abbb5654f3b1d41cd2105d81e799e86854dc7
e44b476a3d816250cf62a1f25b8d2646fc8883a0c1c7b6a37f1524c369cb7492
47848a0b5692b285095bbf00ad19489d1462b17423820e0058428d2a0c55f5ea
1dadf43e233f70613372f0928d937e41d65fecf16c223bdb7cde3759cbee7460
4085f2a7ce77326ea607808419f8509ee8efd85561d99735a969a7aac50c06c2
5a04abfc800bcadc9e447a2ec3453484fdd567050e1e9ec9db73dbd3105588cd
675fda79e3674340c5c43465713e38d83d28f89ef16dff20153e21e78fb03d4a
e6e39f2bdb83adf7e93d5a68948140f7f64c261c94692934411520f77602d4f7
bcf46b2ed4a20068d40824713320f46a43b7d4b7500061af1e39f62e97244546
"""

PI_FRACTION = bytes.fromhex("".join(_PI_FRACTION_HEX.split()))
assert len(PI_FRACTION) == SCHEDULE_BYTES


class KeySchedule:
    """Immutable 2176-byte schedule with per-key accessors."""

    __slots__ = ("data", "source")

    def __init__(self, data: bytes, source: str = "explicit"):
        if len(data) != SCHEDULE_BYTES:
            raise KeyLengthError(
                f"key material must be {SCHEDULE_BYTES} bytes, got {len(data)}"
            )
        self.data = bytes(data)
        self.source = source

    def __len__(self) -> int:
        return NUM_KEYS

    def __getitem__(self, index: int) -> bytes:
        if not 0 <= index < NUM_KEYS:
            raise IndexError(index)
        return self.data[KEY_BYTES * index : KEY_BYTES * (index + 1)]

    def key_for(self, round_index: int, pair_index: int) -> bytes:
        """Key for branch pair ``pair_index`` in round ``round_index``."""
        if not 0 <= round_index < NUM_ROUNDS:
            raise IndexError(f"round {round_index} out of range")
        if not 0 <= pair_index < KEYS_PER_ROUND:
            raise IndexError(f"pair {pair_index} out of range")
        return self[KEYS_PER_ROUND * round_index + pair_index]

    def all_distinct(self) -> bool:
        return len({self[i] for i in range(NUM_KEYS)}) == NUM_KEYS

    def __repr__(self) -> str:
        return f"KeySchedule(source={self.source!r})"


def derive_round_keys(source=BUILTIN_SOURCE) -> KeySchedule:
    """Build a schedule from ``builtin-pi``, a path, a stream, or raw bytes.

    File and stream sources are used verbatim (an all-zero file is legal and
    yields 136 all-zero keys); only the built-in material is sanity-checked
    for pairwise-distinct keys.
    """
    if source == BUILTIN_SOURCE:
        schedule = KeySchedule(PI_FRACTION, source=BUILTIN_SOURCE)
        assert schedule.all_distinct()
        return schedule
    if isinstance(source, (bytes, bytearray)):
        return KeySchedule(bytes(source))
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return KeySchedule(source.read(SCHEDULE_BYTES + 1), source="stream")
    path = os.fspath(source)
    with open(path, "rb") as fh:
        data = fh.read(SCHEDULE_BYTES + 1)
    return KeySchedule(data, source=path)
