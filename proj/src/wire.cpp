#include <chaintier/wire.hpp>

namespace chaintier::wire
{
namespace
{
	bytes signed_portion (envelope const & env)
	{
		byte_writer writer;
		writer.u8 (static_cast<std::uint8_t> (env.msg_kind));
		writer.u32 (env.sender);
		writer.var_bytes (env.payload);
		return writer.take ();
	}
}

bytes encode_envelope (envelope const & env)
{
	byte_writer writer;
	writer.raw (byte_view (signed_portion (env)));
	writer.raw (env.sig);
	return writer.take ();
}

envelope decode_envelope (byte_view data)
{
	byte_reader reader (data);
	envelope env;
	env.msg_kind = static_cast<kind> (reader.u8 ());
	env.sender = reader.u32 ();
	env.payload = reader.var_bytes ();
	env.sig = reader.fixed<crypto::signature_width> ();
	if (!reader.finished ())
	{
		throw codec_error ("trailing bytes after envelope");
	}
	return env;
}

envelope make_envelope (crypto::key_pair const & key, kind msg_kind, std::uint32_t sender, bytes payload)
{
	envelope env;
	env.msg_kind = msg_kind;
	env.sender = sender;
	env.payload = std::move (payload);
	env.sig = crypto::sign (crypto::sig_id::mac33, key, signed_portion (env));
	return env;
}

bool verify_envelope (envelope const & env, crypto::public_key const & pub)
{
	return crypto::verify (crypto::sig_id::mac33, pub, signed_portion (env), env.sig);
}
}
