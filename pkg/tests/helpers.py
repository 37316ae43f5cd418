"""Small fixtures shared by several test modules."""
import numpy as np

from uwbenergy.fibre import AttenuationProfile, FibreProfile, RamanGainSpectrum
from uwbenergy.spectrum import Channel, ChannelGrid


def grid_of(freqs, band="C"):
    return ChannelGrid(tuple(Channel(float(f), band) for f in freqs))


def flat_fibre(db_per_km=0.2, raman=True, length=80.0):
    """Wavelength-independent loss; optionally without Raman coupling."""
    r = RamanGainSpectrum() if raman else RamanGainSpectrum(peak_efficiency=0.0)
    return FibreProfile("flat", AttenuationProfile(table=((1200.0, db_per_km), (1700.0, db_per_km))),
                        raman=r, span_length=length)


def c_band_freqs(n, start=192.0, step=0.15):
    return start + step * np.arange(n)
