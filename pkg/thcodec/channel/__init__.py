from thcodec.channel.loss import apply_losses, receiver_loss_policy
from thcodec.channel.simulator import ChannelConfig, ChannelMode, ChannelReport, transmit

__all__ = [
    "ChannelConfig",
    "ChannelMode",
    "ChannelReport",
    "apply_losses",
    "receiver_loss_policy",
    "transmit",
]
