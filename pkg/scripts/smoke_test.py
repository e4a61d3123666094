"""Cipher smoke test: encrypt/decrypt a synthetic image with every scheme and report what broke.
Run: PYTHONPATH=. python3 scripts/smoke_test.py
"""
import numpy as np

from src.models.configs import CipherConfig, JpegParams
from src.core.security import generate_secret_key, key_fingerprint
from src.models.image import Image
from src.services.analysis_service import psnr
from src.services.cipher_service import decrypt_image, encrypt_image, luminance_plane
from src.services.jpeg_service import jpeg_decode, jpeg_encode

problems = []

print("🔍 Starting cipher smoke test")

rng = np.random.default_rng(0)
yy, xx = np.mgrid[0:96, 0:128]
planes = np.stack([(xx + 2 * c * yy) % 256 for c in range(3)]).astype(np.float64)
planes += rng.normal(0, 4, planes.shape)
img = Image(np.clip(planes, 0, 255).astype(np.uint8))
sk = generate_secret_key(b"smoke")
print("Key:", key_fingerprint(sk))

for scheme in ("conventional", "grayscale", "luminance"):
    cfg = CipherConfig(scheme=scheme)
    try:
        enc, record = encrypt_image(img, sk, cfg)
        dec = decrypt_image(enc, sk, cfg)
        reference = luminance_plane(img) if scheme == "luminance" else img
        print(f"{scheme}: {record.n} blocks, encrypted {enc.width}x{enc.height}, lossless PSNR {psnr(dec, reference):.2f} dB")
        subsampling = "444" if enc.channels == 3 else "gray"
        jpeg = jpeg_encode(enc, JpegParams(quality=90, subsampling=subsampling))
        lossy = decrypt_image(jpeg_decode(jpeg)[0], sk, cfg)
        print(f"{scheme}: JPEG Q90 {len(jpeg)} bytes, PSNR {psnr(lossy, reference):.2f} dB")
    except Exception as e:
        problems.append(f"{scheme}: {e}")

if problems:
    print("\n⚠️ Issues detected:")
    for p in problems:
        print(" -", p)
else:
    print("\n✅ All schemes round-tripped")
