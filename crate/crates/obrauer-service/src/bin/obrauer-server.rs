use clap::Parser;
use tokio::net::TcpListener;

/// Serve oriented Brauer computations over HTTP/JSON.
#[derive(Parser)]
#[command(version)]
struct Args {
    /// Address to listen on.
    #[arg(long, env = "OBRAUER_BIND", default_value = "127.0.0.1:8417")]
    bind: String,
}

#[tokio::main]
async fn main() -> std::io::Result<()> {
    let args = Args::parse();
    let listener = TcpListener::bind(&args.bind).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    tokio::select! {
        r = obrauer_service::serve(listener) => r,
        _ = tokio::signal::ctrl_c() => Ok(()),
    }
}
